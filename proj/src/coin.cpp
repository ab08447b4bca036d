#include "specmix/coin.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "specmix/error.hpp"
#include "specmix/parallel.hpp"

namespace specmix {

namespace {

const double kPiUpper = std::nextafter(M_PI, 4.0);

// mpq_get_d truncates toward zero, so one step up dominates any x >= 0
double to_double_upper(const Rational& x) {
    return std::nextafter(mpq_get_d(x.get_mpq_t()), HUGE_VAL);
}

// upper bound on exp(pi*s) - 1, monotone in every rounding step
double expm1_upper(const Rational& s) {
    if (sgn(s) <= 0) return 0.0;
    double z = std::nextafter(kPiUpper * to_double_upper(s), HUGE_VAL);
    return std::nextafter(std::expm1(z), HUGE_VAL) * (1.0 + 8.0 * DBL_EPSILON);
}

// largest certifiable tail exponent: exp(pi*thr) - 1 <= eps/2
Rational tail_threshold(double eps) {
    double g = std::log1p(eps / 2.0) / M_PI;
    for (int i = 0; i < 8; ++i) g = std::nextafter(g, 0.0);
    if (!(g > 0.0)) fail("truncation-infeasible", "eps leaves no certifiable tail budget");
    return Rational(g);
}

unsigned max_levels_cap() {
    if (const char* s = std::getenv("SPECMIX_MAX_LEVELS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 4096;
}

// num/den assumed coprime with den > 0; skips the canonicalization pass
Rational rational_raw(const Int& num, const Int& den) {
    Rational r;
    mpz_set(mpq_numref(r.get_mpq_t()), num.get_mpz_t());
    mpz_set(mpq_denref(r.get_mpq_t()), den.get_mpz_t());
    return r;
}

Rational dist_exact(const TorusPoint& C) {
    const Int& num = C.value.get_num();
    const Int& den = C.value.get_den();
    if (2 * num <= den) return C.value;
    return rational_raw(den - num, den);
}

Rational dist_upper128(const TorusPoint& C) {
    return dyadic_upper(dist_exact(C), 128);
}

Rational pow_rational(const Rational& x, unsigned long e) {
    Rational r;
    mpz_pow_ui(mpq_numref(r.get_mpq_t()), x.get_num().get_mpz_t(), e);
    mpz_pow_ui(mpq_denref(r.get_mpq_t()), x.get_den().get_mpz_t(), e);
    return r;
}

unsigned tail_alphabet(const CoinMeasure& mu) {
    unsigned a = 2;
    for (const auto& lv : mu.levels) a = std::max(a, lv.A);
    return a;
}

// certified upper bound on sum_{t > materialized} (A-1) * min(|m| B_t, 1/2)
Rational tail_beyond(const CoinMeasure& mu, const Int& absm) {
    const TailBound& tb = mu.tail;
    const unsigned amax = tail_alphabet(mu);
    const Rational half(1, 2);
    const size_t Tm = mu.levels.size();
    switch (tb.kind) {
    case TailBound::Kind::Geometric: {
        if (sgn(tb.scale) < 0 || sgn(tb.ratio) < 0)
            fail("tail-bound-unavailable", "negative geometric tail parameters");
        if (sgn(tb.scale) == 0) return Rational(0);
        if (tb.ratio >= 1)
            fail("tail-bound-unavailable", "geometric tail does not contract");
        Rational sum = tb.scale * pow_rational(tb.ratio, Tm + 1) / (1 - tb.ratio);
        return dyadic_upper((amax - 1) * absm * sum, 128);
    }
    case TailBound::Kind::PowerGrowth: {
        if (sgn(tb.coef) < 0)
            fail("tail-bound-unavailable", "negative growth coefficient");
        if (tb.n.size() < Tm)
            fail("tail-bound-unavailable", "growth table shorter than the level list");
        if (tb.n.empty()) return Rational(0);
        if (tb.growth_factor < 2 || tb.growth_power < 1)
            fail("tail-bound-unavailable", "growth law too weak to contract");
        for (const Int& v : tb.n)
            if (v < 1) fail("tail-bound-unavailable", "growth table entries must be positive");
        Rational total(0);
        for (size_t t = Tm; t < tb.n.size(); ++t) {
            Rational term = absm * tb.coef / tb.n[t];
            if (term > half) term = half;
            total = dyadic_upper(total + (amax - 1) * term, 128);
        }
        Int lp;
        mpz_pow_ui(lp.get_mpz_t(), tb.n.back().get_mpz_t(), tb.growth_power);
        // n at least doubles each step past the table, so the rest telescopes
        Rational beyond = Rational(2) * absm * tb.coef / (tb.growth_factor * lp);
        return dyadic_upper(total + (amax - 1) * beyond, 128);
    }
    case TailBound::Kind::PrimeFactorial: {
        if (tb.prime_p < 1 || tb.prime_P < 2)
            fail("tail-bound-unavailable", "prime tail parameters out of range");
        const Int P2 = tb.prime_P * tb.prime_P;
        Int nt;
        mpz_fac_ui(nt.get_mpz_t(), static_cast<unsigned long>(Tm + 1));
        Int pw;
        mpz_pow_ui(pw.get_mpz_t(), P2.get_mpz_t(), static_cast<unsigned long>(Tm + 1));
        nt *= pw;
        const Rational stop = rational_raw(1, Int(1) << 220);
        Rational total(0);
        for (unsigned long t = static_cast<unsigned long>(Tm + 1), steps = 0;; ++t, ++steps) {
            if (steps > 100000)
                fail("tail-bound-unavailable", "prime factorial tail failed to settle");
            Rational term = Rational(absm) / nt;
            if (term > half) term = half;
            term *= (amax - 1);
            if (term <= stop) {
                // consecutive terms at least halve, so the rest is one more term
                total = dyadic_upper(total + 2 * term, 128);
                return total;
            }
            total = dyadic_upper(total + term, 128);
            nt *= P2 * (t + 1);
        }
    }
    }
    fail("tail-bound-unavailable", "unknown tail kind");
}

void check_tail_dominates(const CoinMeasure& mu) {
    const TailBound& tb = mu.tail;
    const size_t Tm = mu.levels.size();
    switch (tb.kind) {
    case TailBound::Kind::Geometric: {
        if (sgn(tb.scale) == 0) return;
        for (size_t t = 0; t < Tm; ++t) {
            Rational bt = tb.scale * pow_rational(tb.ratio, t + 1);
            if (bt < dist_exact(mu.levels[t].C))
                fail("tail-bound-unavailable",
                     "tail bound does not dominate level " + std::to_string(t + 1));
        }
        return;
    }
    case TailBound::Kind::PowerGrowth: {
        if (tb.n.size() < Tm)
            fail("tail-bound-unavailable", "growth table shorter than the level list");
        for (size_t t = 0; t + 1 < tb.n.size(); ++t)
            if (tb.n[t] >= tb.n[t + 1])
                fail("tail-bound-unavailable", "growth table must increase strictly");
        for (size_t t = 0; t < Tm; ++t) {
            if (tb.n[t] < 1)
                fail("tail-bound-unavailable", "growth table entries must be positive");
            Rational bt = tb.coef / tb.n[t];
            if (bt < dist_exact(mu.levels[t].C))
                fail("tail-bound-unavailable",
                     "tail bound does not dominate level " + std::to_string(t + 1));
        }
        return;
    }
    case TailBound::Kind::PrimeFactorial: {
        Int nt(1);
        const Int P2 = tb.prime_P * tb.prime_P;
        for (size_t t = 0; t < Tm; ++t) {
            nt *= P2 * static_cast<unsigned long>(t + 1);
            Rational bt = rational_raw(1, nt);
            if (bt < dist_exact(mu.levels[t].C))
                fail("tail-bound-unavailable",
                     "tail bound does not dominate level " + std::to_string(t + 1));
        }
        return;
    }
    }
}

}  // namespace

TailBound finite_tail() {
    TailBound tb;
    tb.kind = TailBound::Kind::Geometric;
    tb.scale = 0;
    tb.ratio = Rational(1, 2);
    return tb;
}

TailBound geometric_tail(const Rational& scale, const Rational& ratio) {
    TailBound tb;
    tb.kind = TailBound::Kind::Geometric;
    tb.scale = scale;
    tb.ratio = ratio;
    return tb;
}

void validate_measure(const CoinMeasure& mu) {
    for (size_t t = 0; t < mu.levels.size(); ++t) {
        const CoinLevel& lv = mu.levels[t];
        if (lv.A < 2)
            fail("invalid-level", "alphabet at level " + std::to_string(t + 1) + " is below 2");
        if (sgn(lv.C.value) <= 0 || lv.C.value >= 1)
            fail("invalid-level",
                 "frequency at level " + std::to_string(t + 1) + " must lie strictly inside (0,1)");
    }
    check_tail_dominates(mu);
}

void finalize_measure(CoinMeasure& mu) {
    validate_measure(mu);
    mu.level_dist_upper.clear();
    mu.level_dist_upper.reserve(mu.levels.size());
    for (const auto& lv : mu.levels) mu.level_dist_upper.push_back(dist_upper128(lv.C));
}

LevelFactor level_factor_detail(const CoinLevel& level, const Int& m) {
    LevelFactor out;
    TorusPoint theta = torus_scale(m, level.C.value);
    if (sgn(theta.value) == 0) {
        out.value = {1.0, 0.0};
        out.exact_one = true;
        return out;
    }
    const Int& q = theta.value.get_den();
    if (q > 1 && Int(Int(level.A) % q) == 0) {
        // e^{2 pi i theta} is a nontrivial q-th root of unity and q | A
        out.value = {0.0, 0.0};
        out.exact_zero = true;
        return out;
    }
    Rational d = dist_exact(theta);
    if (d * (level.A - 1) <= rational_raw(1, Int(1) << 80)) {
        // |factor - 1| <= pi*(A-1)*dist(theta); too small for doubles to see
        out.value = {1.0, 0.0};
        out.err = 3e-24;
        return out;
    }
    const Rational& th = theta.value;
    double snum = sin_pi(th * level.A);
    double sden = sin_pi(th);
    double ratio = snum / (level.A * sden);
    std::complex<double> phase = unit_phase(torus_reduce(th * (level.A - 1) / 2));
    out.value = phase * ratio;
    out.err = 1e-14;
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag())) {
        std::complex<double> acc{0.0, 0.0};
        for (unsigned r = 0; r < level.A; ++r)
            acc += unit_phase(torus_reduce(th * r));
        out.value = acc / static_cast<double>(level.A);
        out.err = level.A * 5e-16 + 1e-15;
    }
    return out;
}

std::complex<double> level_factor(const CoinLevel& level, const Int& m) {
    return level_factor_detail(level, m).value;
}

TruncationPlan plan_truncation(const CoinMeasure& mu, const Int& m, double eps) {
    if (!(eps > 0)) fail("invalid-epsilon", "eps must be positive");
    const Rational thr = tail_threshold(eps);
    const size_t Tm = mu.levels.size();
    const size_t cap = std::min<size_t>(Tm, max_levels_cap());
    const Int absm = abs(m);
    std::vector<Rational> local;
    const std::vector<Rational>* dist = &mu.level_dist_upper;
    if (dist->size() != Tm) {
        local.reserve(Tm);
        for (const auto& lv : mu.levels) local.push_back(dist_upper128(lv.C));
        dist = &local;
    }
    const Rational half(1, 2);
    std::vector<Rational> suffix(Tm + 1);
    suffix[Tm] = tail_beyond(mu, absm);
    for (size_t t = Tm; t-- > 0;) {
        Rational term = absm * (*dist)[t];
        if (term > half) term = half;
        term *= (mu.levels[t].A - 1);
        suffix[t] = dyadic_upper(suffix[t + 1] + term, 128);
    }
    for (size_t T = 0; T <= cap; ++T)
        if (suffix[T] <= thr) return {static_cast<unsigned>(T), suffix[T]};
    fail("truncation-infeasible",
         "certified tail exceeds the eps budget at every depth up to " + std::to_string(cap));
}

FourierValue fourier_rho(const CoinMeasure& mu, const Int& m, double eps) {
    TruncationPlan plan;
    try {
        plan = plan_truncation(mu, m, eps);
    } catch (const Error& e) {
        if (e.code() == "truncation-infeasible") {
            size_t cap = std::min<size_t>(mu.levels.size(), max_levels_cap());
            for (size_t t = 0; t < cap; ++t)
                if (level_factor_detail(mu.levels[t], m).exact_zero)
                    return {{0.0, 0.0}, 0.0};
        }
        throw;
    }
    std::complex<double> acc{1.0, 0.0};
    double ferr = 0.0;
    for (unsigned t = 0; t < plan.T; ++t) {
        LevelFactor lf = level_factor_detail(mu.levels[t], m);
        if (lf.exact_zero) return {{0.0, 0.0}, 0.0};
        if (lf.exact_one) continue;
        acc *= lf.value;
        ferr += lf.err + 2.0 * DBL_EPSILON;
    }
    double radius = expm1_upper(plan.tail_sum) + ferr * (1.0 + 1e-12);
    if (radius > eps)
        fail("truncation-infeasible", "certified radius exceeds the eps budget");
    return {acc, radius};
}

FourierValue fourier_sigma(const CoinMeasure& mu, const Int& m, double eps) {
    if (!(eps > 0)) fail("invalid-epsilon", "eps must be positive");
    FourierValue r = fourier_rho(mu, m, eps / 3.0);
    double v = std::norm(r.value);
    double radius = 0.0;
    if (r.error_radius > 0.0)
        radius = 3.0 * r.error_radius + 4.0 * DBL_EPSILON;
    if (radius > eps)
        fail("truncation-infeasible", "certified radius exceeds the eps budget");
    return {{v, 0.0}, radius};
}

CorrelationTable verify_profile(const CoinMeasure& mu, const SequenceFamily& family,
                                const AnchorSequence& anchor, const std::vector<int>& xi,
                                unsigned K, const Int& m_lo, const Int& m_hi, double eps,
                                unsigned jobs) {
    const unsigned N = family.size();
    if (xi.size() != N) fail("profile-length-mismatch", "xi length must match the family size");
    if (anchor.entries.size() < K)
        fail("anchor-too-short", "anchor has fewer entries than the requested depth");
    if (m_hi < m_lo) fail("empty-range", "m range is empty");
    Int span_z = m_hi - m_lo + 1;
    if (span_z > 1000000) fail("range-too-large", "m range has more than 1e6 points");
    const size_t span = mpz_get_ui(span_z.get_mpz_t());

    std::vector<FourierValue> target(span);
    parallel_for(span, jobs, [&](size_t i) {
        target[i] = fourier_sigma(mu, m_lo + static_cast<long>(i), eps);
    });

    CorrelationTable out;
    out.rows.resize(static_cast<size_t>(N) * K * span);
    parallel_for(out.rows.size(), jobs, [&](size_t idx) {
        const unsigned j = static_cast<unsigned>(idx / (static_cast<size_t>(K) * span)) + 1;
        const size_t rem = idx % (static_cast<size_t>(K) * span);
        const unsigned k = static_cast<unsigned>(rem / span) + 1;
        const size_t mi = rem % span;
        const Int m = m_lo + static_cast<long>(mi);
        const Int shifted_index = eval_member(family, j, anchor.entries[k - 1].n) + m;
        FourierValue shifted = fourier_sigma(mu, shifted_index, eps);
        const double factor = xi[j - 1] ? 0.0 : 1.0;
        CorrelationRow& row = out.rows[idx];
        row.j = j;
        row.k = k;
        row.m = m;
        row.sigma_shifted = shifted.value.real();
        row.sigma_target = factor * target[mi].value.real();
        row.error = std::abs(row.sigma_shifted - row.sigma_target);
        row.radius = shifted.error_radius + factor * target[mi].error_radius;
    });
    return out;
}

double wiener_average(const CoinMeasure& mu, unsigned M, double eps, unsigned jobs) {
    const size_t span = 2ul * M + 1ul;
    std::vector<double> vals(span);
    parallel_for(span, jobs, [&](size_t i) {
        Int m = Int(static_cast<long>(i)) - static_cast<long>(M);
        double s = fourier_sigma(mu, m, eps).value.real();
        vals[i] = s * s;
    });
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc / static_cast<double>(span);
}

ValueHistogram enumerate_values(const CoinMeasure& mu) {
    unsigned long total = 1;
    for (const auto& lv : mu.levels) {
        if (total > (1ul << 22) / lv.A)
            fail("enumeration-too-large", "digit space exceeds the enumeration guard");
        total *= lv.A;
    }
    std::map<Rational, unsigned long> acc;
    acc[Rational(0)] = 1;
    for (const auto& lv : mu.levels) {
        std::map<Rational, unsigned long> next;
        for (const auto& [v, c] : acc) {
            for (unsigned d = 0; d < lv.A; ++d) {
                TorusPoint p = torus_reduce(v + d * lv.C.value);
                next[p.value] += c;
            }
        }
        acc.swap(next);
        if (acc.size() > 200000)
            fail("enumeration-too-large", "value histogram exceeds the enumeration guard");
    }
    ValueHistogram hist;
    hist.total = total;
    hist.atoms.assign(acc.begin(), acc.end());
    return hist;
}

double sigma_from_histogram(const ValueHistogram& hist, const Int& m) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [v, c] : hist.atoms)
        acc += static_cast<double>(c) * unit_phase(torus_scale(m, v));
    acc /= static_cast<double>(hist.total);
    return std::norm(acc);
}

double sigma_by_enumeration(const CoinMeasure& mu, const Int& m) {
    return sigma_from_histogram(enumerate_values(mu), m);
}

}  // namespace specmix
