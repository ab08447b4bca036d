#include "specmix/generic.hpp"

#include <algorithm>

#include "specmix/parallel.hpp"
#include "specmix/poly.hpp"
#include "specmix/rng.hpp"

namespace specmix {

namespace {

// nonzero integer vectors with |a|_inf <= box, lexicographic
std::vector<std::vector<Int>> box_vectors(unsigned N, unsigned box) {
    std::vector<std::vector<Int>> out;
    std::vector<long> cur(N, -static_cast<long>(box));
    while (true) {
        bool nonzero = false;
        for (long v : cur)
            if (v != 0) nonzero = true;
        if (nonzero) out.emplace_back(cur.begin(), cur.end());
        int i = static_cast<int>(N) - 1;
        while (i >= 0 && cur[i] == static_cast<long>(box)) {
            cur[i] = -static_cast<long>(box);
            --i;
        }
        if (i < 0) break;
        ++cur[i];
    }
    return out;
}

double star_discrepancy(std::vector<Rational> pts) {
    std::sort(pts.begin(), pts.end());
    const double M = static_cast<double>(pts.size());
    double best = 0.0;
    for (size_t i = 1; i <= pts.size(); ++i) {
        double x = to_double(pts[i - 1]);
        best = std::max(best, x - (static_cast<double>(i) - 1.0) / M);
        best = std::max(best, static_cast<double>(i) / M - x);
    }
    return best;
}

Rational max_subset_distance(const std::vector<Rational>& g) {
    Rational cur(0), best(0);
    std::vector<char> on(g.size(), 0);
    for (unsigned long i = 1; i < (1ul << g.size()); ++i) {
        unsigned b = static_cast<unsigned>(__builtin_ctzl(i));
        if (on[b]) cur -= g[b];
        else cur += g[b];
        on[b] ^= 1;
        Rational dev = dist_to_int(cur);
        if (dev > best) best = dev;
    }
    return best;
}

using ProfileList = std::vector<std::pair<std::string, std::vector<Rational>>>;

// sorted unique profile keys with their target vectors b
ProfileList profile_targets(const SequenceFamily& fam, const std::vector<std::string>& keys) {
    if (keys.empty()) fail("empty-profile", "at least one profile is required");
    std::map<std::string, std::vector<Rational>> by_key;
    for (const auto& key : keys) {
        MixingProfile p = make_profile(xi_from_key(key));
        if (p.N != fam.size())
            fail("profile-length-mismatch", "profile " + key + " does not fit the family");
        by_key[key] = p.b;
    }
    return ProfileList(by_key.begin(), by_key.end());
}

// all three search conditions (plus chain membership recorded last), in the
// fixed order interval / phase-target / phase-carry / independence
std::vector<CertItem> gen_entry_certificate(const SequenceFamily& fam, const ProfileList& bs,
                                            const ProfileList& alphas, const std::vector<Int>& ns,
                                            size_t k, IndependenceChain& chain) {
    std::vector<CertItem> cert;
    const Int& nk = ns[k - 1];
    const Int nprev = (k >= 2) ? ns[k - 2] : Int(1);
    const Int envelope = (Int(1) << k) * phi_bound(fam, nprev);
    const unsigned N = fam.size();
    std::vector<Int> phis(N);
    for (unsigned l = 1; l <= N; ++l) phis[l - 1] = eval_member(fam, l, nk);

    for (const auto& [key, avec] : alphas) {
        Rational w = avec[k - 1] * envelope;
        cert.push_back({"interval", "xi=" + key, w, sgn(avec[k - 1]) > 0 && w <= 1});
    }
    size_t pi = 0;
    for (const auto& [key, avec] : alphas) {
        const auto& b = bs[pi++].second;
        for (unsigned l = 1; l <= N; ++l) {
            Rational w = dist_to_int(torus_scale(phis[l - 1], avec[k - 1] / 2).value - b[l - 1] / 2);
            cert.push_back({"phase-target", "xi=" + key + " l=" + std::to_string(l), w,
                            w * static_cast<unsigned long>(k) < 1});
        }
    }
    for (const auto& [key, avec] : alphas)
        for (unsigned l = 1; l <= N; ++l)
            for (size_t k0 = 1; k0 < k; ++k0) {
                Rational w = dist_to_int(torus_scale(phis[l - 1], avec[k0 - 1] / 2).value);
                cert.push_back({"phase-carry",
                                "xi=" + key + " l=" + std::to_string(l) + " k0=" + std::to_string(k0),
                                w, w * static_cast<unsigned long>(k * k) < 1});
            }
    cert.push_back({"independence", "box=3", Rational(0), chain.try_extend(nk)});
    return cert;
}

}  // namespace

std::complex<double> weyl_sum(const SequenceFamily& family, const std::vector<Int>& a,
                              const Rational& alpha, unsigned long M) {
    if (a.size() != family.size())
        fail("coefficient-length-mismatch", "one coefficient per family member");
    if (M == 0) fail("empty-range", "sample length must be positive");
    std::complex<double> acc{0.0, 0.0};
    for (unsigned long r = 1; r <= M; ++r) {
        Int m(0);
        for (size_t j = 0; j < a.size(); ++j)
            if (a[j] != 0) m += a[j] * eval_member(family, static_cast<unsigned>(j + 1), Int(r));
        acc += unit_phase(torus_scale(m, alpha));
    }
    return acc / static_cast<double>(M);
}

WeylReport equidistribution_report(const SequenceFamily& family,
                                   const std::vector<Rational>& alphas, unsigned long M,
                                   unsigned box, unsigned jobs) {
    if (alphas.size() != family.size())
        fail("alpha-length-mismatch", "one frequency per family member");
    if (M == 0) fail("empty-range", "sample length must be positive");
    if (box == 0) fail("invalid-box", "coefficient box must be positive");
    const unsigned N = family.size();
    std::vector<std::vector<Rational>> orbit(N, std::vector<Rational>(M));
    for (unsigned j = 0; j < N; ++j)
        for (unsigned long r = 1; r <= M; ++r)
            orbit[j][r - 1] = torus_scale(eval_member(family, j + 1, Int(r)), alphas[j]).value;

    auto coeffs = box_vectors(N, box);
    WeylReport rep;
    rep.M = M;
    rep.sums.resize(coeffs.size());
    parallel_for(coeffs.size(), jobs, [&](size_t idx) {
        const auto& a = coeffs[idx];
        std::complex<double> acc{0.0, 0.0};
        for (unsigned long r = 0; r < M; ++r) {
            Rational ph(0);
            for (unsigned j = 0; j < N; ++j)
                if (a[j] != 0) ph += a[j] * orbit[j][r];
            acc += unit_phase(torus_reduce(ph));
        }
        rep.sums[idx] = {a, acc / static_cast<double>(M)};
    });
    for (const auto& [a, s] : rep.sums) rep.max_abs = std::max(rep.max_abs, std::abs(s));
    for (unsigned j = 0; j < N; ++j)
        rep.discrepancy = std::max(rep.discrepancy, star_discrepancy(orbit[j]));
    return rep;
}

std::pair<AnchorSequence, AlphaMap> search_alpha_anchor(const SequenceFamily& family,
                                                        const std::vector<std::string>& profiles,
                                                        unsigned K, unsigned long scan_bound,
                                                        std::uint64_t rng_seed) {
    if (K == 0) fail("invalid-depth", "K must be positive");
    ProfileList bs = profile_targets(family, profiles);
    IndependenceReport ind = is_asymptotically_independent(family);
    if (!ind.independent || !ind.conclusive)
        fail("dependent-family", "the family must be provably asymptotically independent");

    const unsigned N = family.size();
    const size_t P = bs.size();
    SplitMix64 rng(rng_seed);
    ProfileList alphas;
    for (const auto& [key, b] : bs) alphas.emplace_back(key, std::vector<Rational>{});

    std::vector<Int> ns;
    IndependenceChain chain(family, 3);
    Int L(1);
    const Int pow64 = Int(1) << 64;

    for (unsigned k = 1; k <= K; ++k) {
        const Int nprev = ns.empty() ? Int(1) : ns.back();
        const Int denom = pow64 * (Int(1) << k) * phi_bound(family, nprev);
        bool placed = false;
        for (unsigned attempt = 0; attempt < 32 && !placed; ++attempt) {
            std::vector<Rational> draw(P);
            for (size_t i = 0; i < P; ++i)
                draw[i] = make_rational(Int(rng.next()) + 1, denom);
            // Stride the scan so the slowest coordinate n*alpha/2 wraps the torus
            // ~64 times across the window. Without this, families of degree >= 2
            // leave the low-degree coordinates frozen near 0 (alpha shrinks like
            // 1/Phi(n_{k-1}) while L*j grows only linearly) and condition (2) is
            // unreachable for targets away from 0.
            Rational amin = draw[0];
            for (size_t i = 1; i < P; ++i)
                if (draw[i] < amin) amin = draw[i];
            Rational span = Rational(128) / (Rational(L) * amin);
            Int jmax, stride;
            mpz_cdiv_q(jmax.get_mpz_t(), span.get_num().get_mpz_t(),
                       span.get_den().get_mpz_t());
            const Int sb(scan_bound ? scan_bound : 1);
            mpz_cdiv_q(stride.get_mpz_t(), jmax.get_mpz_t(), sb.get_mpz_t());
            if (stride < 1) stride = 1;
            const Int jump = L * stride;
            for (unsigned long j = 1; j <= scan_bound && !placed; ++j) {
                Int n = jump * j;
                if (n <= nprev) continue;
                std::vector<Int> phis(N);
                for (unsigned l = 1; l <= N; ++l) phis[l - 1] = eval_member(family, l, n);
                bool ok = true;
                for (size_t i = 0; i < P && ok; ++i) {
                    const auto& b = bs[i].second;
                    for (unsigned l = 0; l < N && ok; ++l) {
                        Rational t2 = dist_to_int(torus_scale(phis[l], draw[i] / 2).value -
                                                  b[l] / 2);
                        if (!(t2 * k < 1)) ok = false;
                        for (unsigned k0 = 1; k0 < k && ok; ++k0) {
                            Rational t3 = dist_to_int(
                                torus_scale(phis[l], alphas[i].second[k0 - 1] / 2).value);
                            if (!(t3 * (k * k) < 1)) ok = false;
                        }
                    }
                }
                if (!ok) continue;
                if (!chain.try_extend(n)) continue;
                ns.push_back(n);
                for (size_t i = 0; i < P; ++i) {
                    alphas[i].second.push_back(draw[i]);
                    Int dd = 2 * draw[i].get_den();
                    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), dd.get_mpz_t());
                }
                placed = true;
            }
        }
        if (!placed)
            fail("scan-exhausted", "no anchor entry at level " + std::to_string(k) +
                                       " within the scan bound");
    }

    AnchorSequence anchor;
    anchor.n0 = 1;
    anchor.kind = "phase-search";
    IndependenceChain replay(family, 3);
    for (size_t k = 1; k <= ns.size(); ++k) {
        AnchorEntry entry;
        entry.n = ns[k - 1];
        entry.certificate = gen_entry_certificate(family, bs, alphas, ns, k, replay);
        for (const auto& item : entry.certificate)
            if (!item.ok)
                fail("anchor-construction-failed",
                     "accepted entry fails its own certificate: " + item.condition);
        anchor.entries.push_back(std::move(entry));
    }
    return {anchor, AlphaMap(alphas.begin(), alphas.end())};
}

bool verify_alpha_anchor(const SequenceFamily& family, const AnchorSequence& anchor,
                         const AlphaMap& alpha_map) {
    try {
        if (anchor.entries.empty() || alpha_map.empty()) return false;
        if (anchor.n0 != 1) return false;
        std::vector<std::string> keys;
        for (const auto& [key, avec] : alpha_map) {
            if (avec.size() != anchor.entries.size()) return false;
            keys.push_back(key);
        }
        ProfileList bs = profile_targets(family, keys);
        ProfileList alphas(alpha_map.begin(), alpha_map.end());
        std::vector<Int> ns;
        for (const auto& e : anchor.entries) ns.push_back(e.n);
        for (size_t i = 0; i + 1 < ns.size(); ++i)
            if (ns[i] >= ns[i + 1]) return false;
        IndependenceChain replay(family, 3);
        for (size_t k = 1; k <= ns.size(); ++k) {
            auto want = gen_entry_certificate(family, bs, alphas, ns, k, replay);
            const auto& got = anchor.entries[k - 1].certificate;
            if (want.size() != got.size()) return false;
            for (size_t i = 0; i < want.size(); ++i) {
                if (want[i].condition != got[i].condition) return false;
                if (want[i].detail != got[i].detail) return false;
                if (want[i].witness != got[i].witness) return false;
                if (want[i].ok != got[i].ok) return false;
                if (!got[i].ok) return false;
            }
        }
        return true;
    } catch (const Error&) {
        return false;
    }
}

CoinMeasure build_coin_measure_general(const std::vector<Rational>& alphas) {
    CoinMeasure mu;
    for (const Rational& a : alphas) {
        if (sgn(a) <= 0 || a >= 1) fail("invalid-level", "frequencies must lie in (0,1)");
        mu.levels.push_back({TorusPoint{a}, 2});
    }
    mu.tail = finite_tail();
    finalize_measure(mu);
    return mu;
}

CoinMeasure build_coin_measure_general(const SequenceFamily& family,
                                       const std::vector<Rational>& alphas,
                                       const AnchorSequence& anchor) {
    if (anchor.entries.size() < alphas.size())
        fail("anchor-too-short", "envelope needs one anchor entry per level");
    CoinMeasure mu;
    for (const Rational& a : alphas) {
        if (sgn(a) <= 0 || a >= 1) fail("invalid-level", "frequencies must lie in (0,1)");
        mu.levels.push_back({TorusPoint{a}, 2});
    }
    mu.tail.kind = TailBound::Kind::PowerGrowth;
    mu.tail.coef = 1;
    mu.tail.growth_factor = 2;
    mu.tail.growth_power = 1;
    Int p2(1);
    for (size_t t = 1; t <= alphas.size() + 1; ++t) {
        p2 *= 2;
        const Int nprev = (t >= 2) ? anchor.entries[t - 2].n : Int(1);
        mu.tail.n.push_back(p2 * phi_bound(family, nprev));
    }
    finalize_measure(mu);
    return mu;
}

Rational chain_deviation_general(const SequenceFamily& family, const std::vector<Rational>& alpha,
                                 const std::vector<int>& xi, const AnchorSequence& anchor,
                                 unsigned l, unsigned k, unsigned T) {
    if (l == 0 || l > family.size()) fail("index-out-of-range", "family member index");
    if (k == 0 || k > anchor.entries.size()) fail("index-out-of-range", "anchor index");
    if (T > alpha.size()) fail("anchor-too-short", "T exceeds the frequency list");
    if (k > T) fail("index-out-of-range", "anchor index exceeds the digit count");
    if (T > 20) fail("enumeration-too-large", "2^T digit vectors exceed the enumeration guard");
    MixingProfile prof = make_profile(xi);
    if (prof.N != family.size())
        fail("profile-length-mismatch", "profile does not fit the family");
    const Int phi = eval_member(family, l, anchor.entries[k - 1].n);
    std::vector<Rational> g(T);
    for (unsigned t = 0; t < T; ++t) g[t] = torus_scale(phi, alpha[t] / 2).value;
    g[k - 1] = torus_reduce(g[k - 1] - prof.b[l - 1] / 2).value;
    return max_subset_distance(g);
}

Rational chain_bound_general(const SequenceFamily& family, const std::vector<Rational>& alpha,
                             const AnchorSequence& anchor, unsigned l, unsigned k, unsigned T) {
    if (l == 0 || l > family.size()) fail("index-out-of-range", "family member index");
    if (k == 0 || k > anchor.entries.size()) fail("index-out-of-range", "anchor index");
    if (T > alpha.size()) fail("anchor-too-short", "T exceeds the frequency list");
    Int phi = eval_member(family, l, anchor.entries[k - 1].n);
    Rational tail(0);
    for (unsigned t = k + 1; t <= T; ++t) tail += alpha[t - 1];
    tail = abs(Rational(phi)) * tail / 2;
    return tail + Rational(1, k) + make_rational(Int(k) - 1, Int(k) * k);
}

}  // namespace specmix
