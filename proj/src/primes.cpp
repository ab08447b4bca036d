#include "specmix/primes.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "specmix/error.hpp"

namespace specmix {

namespace {

Int prime_product(const PrimeFamilySpec& spec) {
    Int P(1);
    for (const Int& p : spec.primes) P *= p;
    return P;
}

}  // namespace

PrimeFamilySpec prime_exponents(unsigned N, const std::vector<Int>& primes) {
    if (N < 2 || N > 20) fail("invalid-family-size", "N must be in 2..20");
    const unsigned long count = (1ul << N) - 2;
    if (primes.size() != count)
        fail("wrong-prime-count", "need " + std::to_string(count) + " primes, got " +
                                      std::to_string(primes.size()));
    std::set<Int> seen;
    for (const Int& p : primes) {
        if (mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
            fail("not-prime", rational_to_string(Rational(p)) + " is not prime");
        if (!seen.insert(p).second)
            fail("repeated-prime", rational_to_string(Rational(p)) + " appears twice");
    }

    PrimeFamilySpec spec;
    spec.N = N;
    spec.primes = primes;
    Int M = *std::max_element(primes.begin(), primes.end());
    mpz_nextprime(M.get_mpz_t(), M.get_mpz_t());
    spec.primes.push_back(M);

    spec.subsets.resize(count);
    for (unsigned long n = 1; n <= count; ++n) spec.subsets[n - 1] = n;

    spec.q.assign(N, Int(1));
    for (unsigned j = 1; j <= N; ++j)
        for (unsigned long n = 1; n <= count; ++n)
            if (spec.subsets[n - 1] & (1ul << (j - 1))) spec.q[j - 1] *= primes[n - 1];
    return spec;
}

Int index_prime(const PrimeFamilySpec& spec, unsigned long n_index) {
    const unsigned long top = (1ul << spec.N) - 1;
    if (n_index > top) fail("index-out-of-range", "subset index past " + std::to_string(top));
    if (n_index == 0) return Int(1);
    if (n_index == top) return spec.primes.back();
    return spec.primes[n_index - 1];
}

Int index_digit_top(const PrimeFamilySpec& spec, unsigned long n_index) {
    Int c = index_prime(spec, n_index) - 1;
    if (c < 1) c = 1;
    return c;
}

std::vector<int> xi_profile(const PrimeFamilySpec& spec, unsigned long n_index) {
    const unsigned long top = (1ul << spec.N) - 1;
    if (n_index > top) fail("index-out-of-range", "subset index past " + std::to_string(top));
    unsigned long mask = 0;
    if (n_index == 0) mask = top;
    else if (n_index < top) mask = spec.subsets[n_index - 1];
    std::vector<int> xi(spec.N);
    for (unsigned j = 0; j < spec.N; ++j) xi[j] = (mask & (1ul << j)) ? 0 : 1;
    return xi;
}

SequenceFamily prime_family(const PrimeFamilySpec& spec) {
    std::vector<std::vector<Int>> coeffs;
    coeffs.reserve(spec.N);
    for (const Int& qj : spec.q) coeffs.push_back({Int(0), qj});
    return family_of_polynomials(coeffs);
}

AnchorSequence prime_anchor(const PrimeFamilySpec& spec, unsigned K) {
    if (K == 0) fail("invalid-depth", "K must be positive");
    const Int P = prime_product(spec);
    const Int P2 = P * P;

    AnchorSequence anchor;
    anchor.n0 = 1;
    anchor.kind = "prime-product";
    Int power(1), fac(1);
    for (unsigned k = 1; k <= K; ++k) {
        power *= P2;
        fac *= k;
        AnchorEntry entry;
        entry.n = power * fac;

        CertItem pw;
        pw.condition = "product-power";
        pw.detail = "n_k / P^(2k)";
        pw.witness = Rational(fac);
        pw.ok = mpz_divisible_p(entry.n.get_mpz_t(), power.get_mpz_t()) != 0;
        entry.certificate.push_back(pw);

        CertItem fc;
        fc.condition = "factorial";
        fc.detail = "n_k / k!";
        fc.witness = Rational(power);
        fc.ok = mpz_divisible_p(entry.n.get_mpz_t(), fac.get_mpz_t()) != 0;
        entry.certificate.push_back(fc);

        anchor.entries.push_back(std::move(entry));
    }
    return anchor;
}

double character_average(const Int& q, const Int& p, const Int& c) {
    if (sgn(q) <= 0 || sgn(p) <= 0) fail("invalid-character", "q and p must be positive");
    if (c < 1) fail("invalid-character", "digit top must be at least 1");
    if (c > 1000000) fail("table-bound-exceeded", "character sum longer than 10^6 terms");
    const unsigned long len = mpz_get_ui(c.get_mpz_t());
    std::complex<double> acc(0.0, 0.0);
    for (unsigned long r = 0; r <= len; ++r)
        acc += unit_phase(torus_scale(q * r, make_rational(Int(1), p)));
    const double mod = std::abs(acc) / static_cast<double>(len + 1);
    return mod * mod;
}

CoinMeasure build_coin_measure_prime(const PrimeFamilySpec& spec, unsigned long n_index,
                                     const AnchorSequence& anchor, unsigned T) {
    if (anchor.entries.size() < T)
        fail("anchor-too-short", "need " + std::to_string(T) + " anchor entries, have " +
                                     std::to_string(anchor.entries.size()));
    const Int p = index_prime(spec, n_index);
    const Int c = index_digit_top(spec, n_index);
    const unsigned long alphabet = mpz_get_ui(c.get_mpz_t()) + 1;

    CoinMeasure mu;
    for (unsigned t = 1; t <= T; ++t) {
        CoinLevel level;
        level.C = torus_reduce(make_rational(Int(1), p * anchor.entries[t - 1].n));
        level.A = static_cast<unsigned>(alphabet);
        mu.levels.push_back(level);
    }
    mu.tail.kind = TailBound::Kind::PrimeFactorial;
    mu.tail.prime_p = p;
    mu.tail.prime_P = prime_product(spec);
    finalize_measure(mu);
    return mu;
}

}  // namespace specmix
