#include "specmix/grid.hpp"

#include <algorithm>
#include <string>

#include "specmix/error.hpp"

namespace specmix {

namespace {

constexpr unsigned kMaxResolution = 24;

void check_resolution(unsigned G) {
    if (G > kMaxResolution)
        fail("resolution-overflow", "grid resolution past 2^" + std::to_string(kMaxResolution));
}

void check_same(const GridAutomorphism& a, const GridAutomorphism& b) {
    if (a.G != b.G) fail("resolution-mismatch", "automorphisms live on different grids");
}

void check_interval(const DyadicInterval& e, unsigned G) {
    if (e.rank < 1 || e.rank > G) fail("rank-too-fine", "interval rank outside 1..G");
    if (e.index >= (1ul << e.rank)) fail("index-out-of-range", "interval index past 2^rank");
}

GridAutomorphism from_perm(unsigned G, std::vector<std::uint32_t> perm) {
    GridAutomorphism T;
    T.G = G;
    T.fwd = std::move(perm);
    T.inv.assign(T.fwd.size(), 0);
    std::vector<bool> seen(T.fwd.size(), false);
    for (unsigned long c = 0; c < T.fwd.size(); ++c) {
        const std::uint32_t y = T.fwd[c];
        if (y >= T.fwd.size() || seen[y]) fail("invalid-permutation", "not a bijection on cells");
        seen[y] = true;
        T.inv[y] = static_cast<std::uint32_t>(c);
    }
    return T;
}

GridAutomorphism compose(const GridAutomorphism& a, const GridAutomorphism& b) {
    // (a . b)(x) = a(b(x)); both validated before, skip the bijection check
    GridAutomorphism r;
    r.G = a.G;
    r.fwd.resize(a.fwd.size());
    r.inv.resize(a.fwd.size());
    for (unsigned long c = 0; c < a.fwd.size(); ++c) {
        r.fwd[c] = a.fwd[b.fwd[c]];
        r.inv[r.fwd[c]] = static_cast<std::uint32_t>(c);
    }
    return r;
}

// T^n by binary exponentiation; negative n flips to the inverse first
GridAutomorphism automorphism_power(const GridAutomorphism& T, const Int& n) {
    GridAutomorphism base = T;
    Int e = n;
    if (e < 0) {
        std::swap(base.fwd, base.inv);
        e = -e;
    }
    GridAutomorphism acc = identity_automorphism(T.G);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) acc = compose(acc, base);
        base = compose(base, base);
        mpz_fdiv_q_2exp(e.get_mpz_t(), e.get_mpz_t(), 1);
    }
    return acc;
}

// slab weights as integers over 2^Llam, with the closing weight 1 appended
struct SlabLayout {
    unsigned Llam = 0;
    std::vector<unsigned long> Lam;  // Lam[0] = 0, Lam[N+1] = 2^Llam
};

SlabLayout slab_layout(const MixingProfile& profile) {
    if (profile.lambda.empty())
        fail("invalid-profile", "gluing needs a lambda-mode profile");
    SlabLayout s;
    for (const Rational& l : profile.lambda) {
        const Int den = l.get_den();
        const unsigned long bits = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
        if ((Int(1) << bits) != den)
            fail("non-dyadic-lambda", "weight denominator is not a power of two");
        s.Llam = std::max<unsigned>(s.Llam, static_cast<unsigned>(bits));
    }
    s.Lam.push_back(0);
    const Int unit = Int(1) << s.Llam;
    for (const Rational& l : profile.lambda) {
        Rational scaled = l * unit;
        s.Lam.push_back(mpz_get_ui(scaled.get_num().get_mpz_t()));
    }
    s.Lam.push_back(1ul << s.Llam);
    return s;
}

std::vector<Rational> slab_weights(const MixingProfile& profile) {
    std::vector<Rational> delta;
    Rational prev(0);
    for (const Rational& l : profile.lambda) {
        delta.push_back(l - prev);
        prev = l;
    }
    delta.push_back(Rational(1) - prev);
    return delta;
}

unsigned long count_overlap(const GridAutomorphism& pow, const DyadicInterval& E,
                            const DyadicInterval& F) {
    const unsigned long ew = 1ul << (pow.G - E.rank);
    const unsigned long flo = F.index << (pow.G - F.rank);
    const unsigned long fhi = flo + (1ul << (pow.G - F.rank));
    unsigned long hits = 0;
    for (unsigned long c = E.index * ew; c < (E.index + 1) * ew; ++c) {
        const std::uint32_t y = pow.fwd[c];
        if (y >= flo && y < fhi) ++hits;
    }
    return hits;
}

}  // namespace

GridAutomorphism make_automorphism(unsigned G, std::vector<std::uint32_t> perm) {
    check_resolution(G);
    if (perm.size() != (1ul << G))
        fail("invalid-permutation", "permutation length must be 2^G");
    return from_perm(G, std::move(perm));
}

GridAutomorphism identity_automorphism(unsigned G) {
    check_resolution(G);
    GridAutomorphism T;
    T.G = G;
    T.fwd.resize(1ul << G);
    for (unsigned long c = 0; c < T.fwd.size(); ++c) T.fwd[c] = static_cast<std::uint32_t>(c);
    T.inv = T.fwd;
    return T;
}

GridAutomorphism cyclic_permutation(unsigned rank, unsigned G) {
    check_resolution(G);
    if (rank < 1 || rank > G)
        fail("resolution-too-coarse", "cyclic rank outside 1..G");
    const unsigned long cells = 1ul << G;
    const unsigned long shift = 1ul << (G - rank);
    std::vector<std::uint32_t> perm(cells);
    for (unsigned long c = 0; c < cells; ++c)
        perm[c] = static_cast<std::uint32_t>((c + shift) & (cells - 1));
    return from_perm(G, std::move(perm));
}

Rational dyadic_metric(const GridAutomorphism& T, const GridAutomorphism& S, unsigned L) {
    check_same(T, S);
    if (L < 1 || L > T.G) fail("rank-too-fine", "truncation rank outside 1..G");
    const unsigned long cells = T.cells();
    std::vector<char> mark(cells);
    Rational total(0);
    for (unsigned l = 1; l <= L; ++l) {
        const unsigned long width = cells >> l;
        unsigned long mismatched = 0;
        for (unsigned long e = 0; e < (1ul << l); ++e) {
            std::fill(mark.begin(), mark.end(), 0);
            for (unsigned long c = e * width; c < (e + 1) * width; ++c) {
                mark[T.fwd[c]] ^= 1;
                mark[S.fwd[c]] ^= 1;
            }
            for (unsigned long y = 0; y < cells; ++y) mismatched += mark[y];
        }
        total += make_rational(Int(mismatched), (Int(1) << (2 * l)) * Int(cells));
    }
    return total;
}

Rational dyadic_metric_tail(unsigned L) { return make_rational(Int(1), Int(1) << L); }

GridAutomorphism conjugate(const GridAutomorphism& T, const GridAutomorphism& S) {
    check_same(T, S);
    GridAutomorphism r;
    r.G = T.G;
    r.fwd.resize(T.fwd.size());
    r.inv.resize(T.fwd.size());
    for (unsigned long c = 0; c < T.fwd.size(); ++c) {
        r.fwd[c] = S.inv[T.fwd[S.fwd[c]]];
        r.inv[r.fwd[c]] = static_cast<std::uint32_t>(c);
    }
    return r;
}

Rational correlation(const GridAutomorphism& T, const DyadicInterval& E, const DyadicInterval& F,
                     const Int& n) {
    check_interval(E, T.G);
    check_interval(F, T.G);
    GridAutomorphism pow = automorphism_power(T, n);
    return make_rational(Int(count_overlap(pow, E, F)), Int(T.cells()));
}

GridAutomorphism glue(const MixingProfile& profile, const std::vector<GridAutomorphism>& pieces,
                      unsigned rank) {
    if (pieces.size() != profile.N + 1)
        fail("piece-count-mismatch", "need " + std::to_string(profile.N + 1) + " pieces, got " +
                                         std::to_string(pieces.size()));
    const unsigned L = pieces.front().G;
    for (const auto& p : pieces)
        if (p.G != L) fail("resolution-mismatch", "pieces live on different grids");
    if (rank < 1 || rank > L) fail("resolution-too-coarse", "gluing rank outside 1..L");

    SlabLayout s = slab_layout(profile);
    const unsigned G = L + s.Llam;
    check_resolution(G);

    const unsigned long W = 1ul << (G - rank);       // cells per rank-l' interval
    const unsigned long inner = 1ul << (L - rank);   // piece cells per interval
    std::vector<unsigned long> w(s.Lam.size());      // slab boundaries in cell offsets
    for (size_t t = 0; t < s.Lam.size(); ++t) w[t] = s.Lam[t] << (L - rank);

    std::vector<std::uint32_t> perm(1ul << G);
    for (unsigned long r = 0; r < (1ul << rank); ++r) {
        for (size_t t = 1; t < s.Lam.size(); ++t) {
            const unsigned long D = s.Lam[t] - s.Lam[t - 1];
            for (unsigned long i = 0; i + w[t - 1] < w[t]; ++i) {
                const unsigned long y = r * W + w[t - 1] + i;
                const unsigned long c = r * inner + i / D;
                const unsigned long sub = i % D;
                const unsigned long cp = pieces[t - 1].fwd[c];
                perm[y] = static_cast<std::uint32_t>((cp / inner) * W + w[t - 1] +
                                                     (cp % inner) * D + sub);
            }
        }
    }
    return from_perm(G, std::move(perm));
}

Rational verify_convex_identity(const GridAutomorphism& glued,
                                const std::vector<GridAutomorphism>& pieces,
                                const MixingProfile& profile, unsigned rank, unsigned test_rank,
                                const std::vector<Int>& n_list) {
    if (test_rank < 1 || test_rank > rank)
        fail("rank-too-fine", "test rank must stay at or above the gluing rank");
    std::vector<Rational> delta = slab_weights(profile);
    if (delta.size() != pieces.size())
        fail("piece-count-mismatch", "profile and pieces disagree");

    Rational worst(0);
    for (const Int& n : n_list) {
        GridAutomorphism gp = automorphism_power(glued, n);
        std::vector<GridAutomorphism> pp;
        pp.reserve(pieces.size());
        for (const auto& p : pieces) pp.push_back(automorphism_power(p, n));
        for (unsigned le = 1; le <= test_rank; ++le)
            for (unsigned long ei = 0; ei < (1ul << le); ++ei)
                for (unsigned lf = 1; lf <= test_rank; ++lf)
                    for (unsigned long fi = 0; fi < (1ul << lf); ++fi) {
                        const DyadicInterval E{le, ei}, F{lf, fi};
                        Rational lhs = make_rational(Int(count_overlap(gp, E, F)),
                                                     Int(glued.cells()));
                        Rational rhs(0);
                        for (size_t t = 0; t < pp.size(); ++t)
                            rhs += delta[t] * make_rational(Int(count_overlap(pp[t], E, F)),
                                                            Int(pieces[t].cells()));
                        Rational res = abs(lhs - rhs);
                        if (res > worst) worst = res;
                    }
    }
    return worst;
}

MetricBoundReport verify_metric_bound(const GridAutomorphism& R, const GridAutomorphism& glued,
                                      const std::vector<GridAutomorphism>& pieces,
                                      const MixingProfile& profile, unsigned rank) {
    check_same(R, glued);
    if (rank < 1 || rank > R.G) fail("rank-too-fine", "rank outside 1..G");
    std::vector<Rational> delta = slab_weights(profile);
    if (delta.size() != pieces.size())
        fail("piece-count-mismatch", "profile and pieces disagree");
    const unsigned L = pieces.front().G;
    if (rank > L) fail("rank-too-fine", "rank finer than the pieces' grid");

    // R must shift whole rank-l' intervals without reshuffling their cells
    const unsigned long W = 1ul << (R.G - rank);
    std::vector<unsigned long> block(1ul << rank);
    for (unsigned long r = 0; r < (1ul << rank); ++r) {
        const std::uint32_t base = R.fwd[r * W];
        if (base % W != 0) fail("not-rank-cyclic", "image interval is not rank-aligned");
        for (unsigned long o = 0; o < W; ++o)
            if (R.fwd[r * W + o] != base + o)
                fail("not-rank-cyclic", "R does not translate interval " + std::to_string(r));
        block[r] = base / W;
    }

    const unsigned long inner = 1ul << (L - rank);
    std::vector<std::uint32_t> rl(1ul << L);
    for (unsigned long r = 0; r < (1ul << rank); ++r)
        for (unsigned long o = 0; o < inner; ++o)
            rl[r * inner + o] = static_cast<std::uint32_t>(block[r] * inner + o);
    GridAutomorphism RL = from_perm(L, std::move(rl));

    MetricBoundReport rep;
    rep.lhs = dyadic_metric(R, glued, rank);
    rep.rhs = Rational(0);
    for (size_t t = 0; t < pieces.size(); ++t)
        rep.rhs += delta[t] * dyadic_metric(RL, pieces[t], rank);
    rep.slack = rep.rhs - rep.lhs;
    rep.ok = rep.slack >= 0;
    return rep;
}

}  // namespace specmix
