#include "specmix/poly.hpp"

#include <algorithm>
#include <variant>

#include "specmix/error.hpp"

namespace specmix {

namespace {

Int pow_int(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

Int factorial(unsigned long l) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), l);
    return r;
}

unsigned long factorial_valuation(unsigned long l, unsigned long p) {
    unsigned long v = 0, q = l;
    while (q >= p) {
        q /= p;
        v += q;
    }
    return v;
}

unsigned long min_l_with_valuation(unsigned long p, unsigned long e) {
    if (e == 0) return 0;
    unsigned long lo = p, hi = p * e;
    while (factorial_valuation(hi, p) < e) hi *= 2;
    while (lo < hi) {
        unsigned long mid = lo + (hi - lo) / 2;
        if (factorial_valuation(mid, p) >= e) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

std::vector<unsigned long> primes_up_to(unsigned long n) {
    std::vector<char> composite(n + 1, 0);
    std::vector<unsigned long> out;
    for (unsigned long i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (unsigned long j = i * i; j <= n; j += i) composite[j] = 1;
    }
    return out;
}

std::map<unsigned long, unsigned long> factor_small(Int v) {
    std::map<unsigned long, unsigned long> out;
    if (v < 1) fail("value-out-of-range", "factoring a nonpositive value");
    unsigned long p = 2;
    while (v > 1 && p <= 1000000) {
        if (v.fits_ulong_p() && p > v.get_ui() / p) break;
        if (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
            v /= p;
            ++out[p];
            continue;
        }
        p = (p == 2) ? 3 : p + 2;
    }
    if (v > 1) {
        if (!v.fits_ulong_p() || mpz_probab_prime_p(v.get_mpz_t(), 30) == 0)
            fail("scan-exhausted", "a required divisor has a prime factor beyond the factor table");
        ++out[v.get_ui()];
    }
    return out;
}

struct PolyContext {
    unsigned N = 0;
    unsigned d = 0;
    std::vector<std::pair<std::string, std::vector<Rational>>> sols;
    Rational a_bound;                                 // max of d * n0 * |x_s|
    std::map<unsigned long, unsigned long> den_val;   // union of denominator valuations
    Int den_lcm = 1;
};

PolyContext make_context(const SequenceFamily& fam, const SolutionsMap& solutions,
                         const Int& n0) {
    if (!fam.all_polynomial())
        fail("non-polynomial-member", "the anchor scan needs a polynomial family");
    if (!fam.zero_constants())
        fail("nonzero-constant-term", "the anchor scan needs zero constant terms");
    if (solutions.empty()) fail("empty-solutions", "no solution vectors supplied");
    if (n0 < 2) fail("invalid-base-point", "n0 must exceed 1");
    PolyContext ctx;
    ctx.N = fam.size();
    IntMatrix D = coefficient_matrix(fam);
    ctx.d = D.empty() ? 0 : static_cast<unsigned>(D[0].size());
    for (const auto& [key, x] : solutions) {
        if (key.size() != ctx.N)
            fail("solution-shape-mismatch", "profile key length differs from the family size");
        for (char c : key)
            if (c != '0' && c != '1')
                fail("solution-shape-mismatch", "profile keys are bit strings");
        if (x.size() != ctx.d)
            fail("solution-shape-mismatch", "solution length differs from the coefficient count");
        bool nonzero = false;
        for (const auto& c : x)
            if (sgn(c) != 0) nonzero = true;
        if (!nonzero) fail("zero-solution", "solution vector for profile " + key + " is zero");
        ctx.sols.emplace_back(key, x);
        for (const auto& c : x) {
            Rational mag = abs(c) * ctx.d * n0;
            if (mag > ctx.a_bound) ctx.a_bound = mag;
            for (const auto& [p, e] : factor_small(c.get_den()))
                ctx.den_val[p] = std::max(ctx.den_val[p], e);
        }
    }
    for (const auto& [p, e] : ctx.den_val) ctx.den_lcm *= pow_int(p, e);
    return ctx;
}

std::vector<CertItem> entry_certificate(const PolyContext& ctx, const std::vector<Int>& ns,
                                        size_t k, const Int& n0) {
    std::vector<CertItem> cert;
    const Int& nk = ns[k - 1];
    if (k == 1) {
        for (const auto& [key, x] : ctx.sols)
            for (unsigned s = 0; s < ctx.d; ++s) {
                Rational w = abs(x[s]) * ctx.d * n0;
                cert.push_back({"initial-bound", "xi=" + key + " s=" + std::to_string(s + 1),
                                w, w < nk});
            }
    }
    for (const auto& [key, x] : ctx.sols)
        for (unsigned s = 0; s < ctx.d; ++s) {
            Rational w = x[s] * nk;
            cert.push_back({"integrality", "xi=" + key + " s=" + std::to_string(s + 1), w,
                            w.get_den() == 1});
        }
    if (k >= 2) {
        Int q = 2 * ctx.d * pow_int(ns[k - 2], ctx.d + 1);
        CertItem item{"divisibility", "", Rational(0), false};
        if (mpz_divisible_p(nk.get_mpz_t(), q.get_mpz_t())) {
            Int quot;
            mpz_divexact(quot.get_mpz_t(), nk.get_mpz_t(), q.get_mpz_t());
            item.witness = Rational(quot);
            item.ok = true;
        } else {
            item.witness = Rational(nk) / q;
        }
        cert.push_back(item);
    }
    return cert;
}

bool direct_conditions_hold(const PolyContext& ctx, const std::vector<Int>& ns, const Int& cand) {
    if (!mpz_divisible_p(cand.get_mpz_t(), ctx.den_lcm.get_mpz_t())) return false;
    if (ns.empty()) return Rational(cand) > ctx.a_bound;
    Int q = 2 * ctx.d * pow_int(ns.back(), ctx.d + 1);
    return mpz_divisible_p(cand.get_mpz_t(), q.get_mpz_t()) != 0;
}

}  // namespace

MixingProfile make_profile(const std::vector<int>& xi) {
    if (xi.empty()) fail("empty-profile", "profile needs at least one bit");
    MixingProfile p;
    p.N = static_cast<unsigned>(xi.size());
    p.xi = xi;
    for (int b : xi) {
        if (b != 0 && b != 1) fail("invalid-profile", "profile bits must be 0 or 1");
        p.b.push_back(b ? Rational(1, 2) : Rational(1));
    }
    return p;
}

MixingProfile make_lambda_profile(const std::vector<Rational>& lambda) {
    if (lambda.empty()) fail("empty-profile", "profile needs at least one weight");
    MixingProfile p;
    p.N = static_cast<unsigned>(lambda.size());
    p.lambda = lambda;
    for (size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < 0 || lambda[i] > 1)
            fail("invalid-profile", "weights must lie in [0,1]");
        if (i > 0 && lambda[i] < lambda[i - 1])
            fail("invalid-profile", "weights must be nondecreasing");
    }
    return p;
}

std::string xi_key(const std::vector<int>& xi) {
    std::string s;
    for (int b : xi) s.push_back(b ? '1' : '0');
    return s;
}

std::vector<int> xi_from_key(const std::string& key) {
    if (key.empty()) fail("empty-profile", "profile needs at least one bit");
    std::vector<int> xi;
    for (char c : key) {
        if (c != '0' && c != '1') fail("invalid-profile", "profile keys are bit strings");
        xi.push_back(c - '0');
    }
    return xi;
}

std::vector<Rational> solve_rational(const IntMatrix& D, const std::vector<Rational>& b) {
    std::vector<Rational> x = solve_exact(D, b);
    for (const auto& c : x)
        if (sgn(c) != 0) return x;
    fail("zero-solution", "system admits only the zero solution");
}

AnchorSequence choose_anchor_poly(const SequenceFamily& family, const SolutionsMap& solutions,
                                  unsigned K, const Int& n0, unsigned long scan_bound,
                                  const std::function<Int(unsigned long)>& base) {
    if (K == 0) fail("invalid-depth", "K must be positive");
    PolyContext ctx = make_context(family, solutions, n0);
    std::vector<Int> ns;
    if (!base) {
        // factorial base: prime valuations already decide every divisibility
        // question, so jump straight to the first admissible index
        std::vector<unsigned long> ls;
        unsigned long start = 1;
        for (const auto& [p, e] : ctx.den_val)
            start = std::max(start, min_l_with_valuation(p, e));
        if (start > scan_bound)
            fail("scan-exhausted", "no admissible first entry within the scan bound");
        unsigned long l = start;
        Int fac = factorial(l);
        while (Rational(fac) <= ctx.a_bound) {
            ++l;
            if (l > scan_bound)
                fail("scan-exhausted", "no admissible first entry within the scan bound");
            fac *= l;
        }
        ns.push_back(fac);
        ls.push_back(l);
        for (unsigned k = 2; k <= K; ++k) {
            unsigned long prev = ls.back();
            std::map<unsigned long, unsigned long> targets;
            for (const auto& [p, e] : factor_small(Int(2) * ctx.d)) targets[p] += e;
            for (unsigned long p : primes_up_to(prev)) {
                unsigned long v = factorial_valuation(prev, p);
                if (v) targets[p] += (ctx.d + 1) * v;
            }
            for (const auto& [p, e] : ctx.den_val)
                targets[p] = std::max(targets[p], e);
            unsigned long next = prev + 1;
            for (const auto& [p, e] : targets)
                next = std::max(next, min_l_with_valuation(p, e));
            if (next > scan_bound)
                fail("scan-exhausted", "divisibility forces an entry beyond the scan bound");
            ns.push_back(factorial(next));
            ls.push_back(next);
        }
    } else {
        unsigned long prev_l = 0;
        for (unsigned k = 1; k <= K; ++k) {
            bool found = false;
            for (unsigned long l = prev_l + 1; l <= scan_bound; ++l) {
                Int cand = base(l);
                if (!mpz_divisible_p(cand.get_mpz_t(), factorial(l).get_mpz_t()))
                    fail("invalid-base", "base entry " + std::to_string(l) +
                                             " is not divisible by its factorial");
                if (!ns.empty() && cand <= ns.back()) continue;
                if (!direct_conditions_hold(ctx, ns, cand)) continue;
                ns.push_back(cand);
                prev_l = l;
                found = true;
                break;
            }
            if (!found)
                fail("scan-exhausted",
                     "no admissible entry " + std::to_string(k) + " within the scan bound");
        }
    }
    AnchorSequence anchor;
    anchor.n0 = n0;
    anchor.kind = "factorial-divisibility";
    for (size_t k = 1; k <= ns.size(); ++k) {
        AnchorEntry entry;
        entry.n = ns[k - 1];
        entry.certificate = entry_certificate(ctx, ns, k, n0);
        for (const auto& item : entry.certificate)
            if (!item.ok)
                fail("anchor-construction-failed",
                     "chosen entry fails its own certificate: " + item.condition);
        anchor.entries.push_back(std::move(entry));
    }
    return anchor;
}

bool verify_anchor_poly(const SequenceFamily& family, const SolutionsMap& solutions,
                        const AnchorSequence& anchor) {
    try {
        PolyContext ctx = make_context(family, solutions, anchor.n0);
        if (anchor.entries.empty()) return false;
        std::vector<Int> ns;
        for (const auto& e : anchor.entries) ns.push_back(e.n);
        for (size_t i = 0; i + 1 < ns.size(); ++i)
            if (ns[i] >= ns[i + 1]) return false;
        for (size_t k = 1; k <= ns.size(); ++k) {
            auto want = entry_certificate(ctx, ns, k, anchor.n0);
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

CoinMeasure build_coin_measure_poly(const std::vector<Rational>& x, const AnchorSequence& anchor,
                                    unsigned T) {
    if (anchor.entries.size() < T)
        fail("anchor-too-short", "anchor has fewer entries than requested levels");
    if (x.empty()) fail("zero-solution", "empty solution vector");
    const unsigned d = static_cast<unsigned>(x.size());
    Rational cmax(0);
    for (const auto& c : x)
        if (abs(c) > cmax) cmax = abs(c);
    if (sgn(cmax) == 0) fail("zero-solution", "solution vector is zero");
    CoinMeasure mu;
    for (unsigned t = 0; t < T; ++t) {
        const Int& n = anchor.entries[t].n;
        Rational acc(0);
        Int npow(1);
        for (unsigned s = 0; s < d; ++s) {
            npow *= n;
            acc += x[s] / npow;
        }
        TorusPoint C = torus_reduce(acc);
        if (sgn(C.value) == 0)
            fail("degenerate-level", "level frequency reduced to zero at entry " +
                                         std::to_string(t + 1));
        mu.levels.push_back({C, 2});
    }
    mu.tail.kind = TailBound::Kind::PowerGrowth;
    mu.tail.coef = cmax * d;
    mu.tail.growth_factor = 2 * d;
    mu.tail.growth_power = d + 1;
    for (unsigned t = 0; t < T; ++t) mu.tail.n.push_back(anchor.entries[t].n);
    finalize_measure(mu);
    return mu;
}

Rational chain_deviation_poly(const SequenceFamily& family, const std::vector<Rational>& x,
                              const AnchorSequence& anchor, unsigned j, unsigned k, unsigned T) {
    if (j == 0 || j > family.size()) fail("index-out-of-range", "family member index");
    if (k == 0 || k > anchor.entries.size()) fail("index-out-of-range", "anchor index");
    if (T > anchor.entries.size()) fail("anchor-too-short", "T exceeds the anchor length");
    if (k > T) fail("index-out-of-range", "anchor index exceeds the digit count");
    if (T > 20) fail("enumeration-too-large", "2^T digit vectors exceed the enumeration guard");
    const IntPolynomial* poly = std::get_if<IntPolynomial>(&family.members[j - 1]);
    if (!poly) fail("non-polynomial-member", "chain deviation needs a polynomial member");
    if (poly->constant != 0)
        fail("nonzero-constant-term", "chain deviation needs a zero constant term");

    const Int vjk = poly->eval(anchor.entries[k - 1].n);
    std::vector<Rational> g(T);
    for (unsigned t = 0; t < T; ++t) {
        const Int& n = anchor.entries[t].n;
        Rational ct(0);
        Int npow(1);
        for (size_t s = 0; s < x.size(); ++s) {
            npow *= n;
            ct += x[s] / npow;
        }
        g[t] = torus_reduce(Rational(vjk) * ct / 2).value;
    }
    Rational target(0);
    for (size_t l = 0; l < poly->coeffs.size() && l < x.size(); ++l)
        target += poly->coeffs[l] * x[l];
    g[k - 1] = torus_reduce(g[k - 1] - target / 2).value;

    Rational cur(0), best(0);
    std::vector<char> on(T, 0);
    for (unsigned long i = 1; i < (1ul << T); ++i) {
        unsigned b = static_cast<unsigned>(__builtin_ctzl(i));
        if (on[b]) cur -= g[b];
        else cur += g[b];
        on[b] ^= 1;
        Rational dev = dist_to_int(cur);
        if (dev > best) best = dev;
    }
    return best;
}

Rational chain_bound_poly(const SequenceFamily& family, unsigned j, const AnchorSequence& anchor,
                          unsigned k) {
    if (j == 0 || j > family.size()) fail("index-out-of-range", "family member index");
    if (k == 0 || k > anchor.entries.size()) fail("index-out-of-range", "anchor index");
    const IntPolynomial* poly = std::get_if<IntPolynomial>(&family.members[j - 1]);
    if (!poly) fail("non-polynomial-member", "chain bound needs a polynomial member");
    if (anchor.entries[k - 1].n <= 1) fail("invalid-anchor", "anchor entries must exceed 1");
    Int asum(0);
    for (const auto& c : poly->coeffs) asum += abs(c);
    return Rational(asum) * 2 * anchor.entries[0].n / (anchor.entries[k - 1].n - 1);
}

}  // namespace specmix
