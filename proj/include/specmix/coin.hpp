#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "specmix/anchor.hpp"
#include "specmix/exact.hpp"
#include "specmix/sequences.hpp"

namespace specmix {

// One digit distribution: a uniform digit d in {0..A-1} contributing d*C to
// the torus sum.
struct CoinLevel {
    TorusPoint C;
    unsigned A = 2;
};

// Closed-form bound on the frequencies of levels past the materialized list.
// B_t must dominate dist_to_int(C_t) wherever it claims to describe a level.
struct TailBound {
    enum class Kind { Geometric, PowerGrowth, PrimeFactorial };
    Kind kind = Kind::Geometric;

    // geometric: B_t = scale * ratio^t; scale 0 means the level list is all
    // there is
    Rational scale;
    Rational ratio;

    // power growth: B_t = coef / n_t with the n table covering at least the
    // materialized levels and n_{t+1} >= growth_factor * n_t^growth_power
    Rational coef;
    Int growth_factor;
    unsigned growth_power = 1;
    std::vector<Int> n;

    // prime factorial: B_t = 1 / (P^{2t} * t!)
    Int prime_p;
    Int prime_P;
};

TailBound finite_tail();
TailBound geometric_tail(const Rational& scale, const Rational& ratio);

struct CoinMeasure {
    std::vector<CoinLevel> levels;
    TailBound tail;
    // derived: 128-bit dyadic upper bounds on dist_to_int(C_t), filled by
    // finalize_measure so coefficient sweeps avoid re-deriving them
    std::vector<Rational> level_dist_upper;
};

void validate_measure(const CoinMeasure& measure);
void finalize_measure(CoinMeasure& measure);

struct FourierValue {
    std::complex<double> value;
    double error_radius = 0.0;
};

struct LevelFactor {
    std::complex<double> value;
    bool exact_zero = false;
    bool exact_one = false;
    double err = 0.0;
};

LevelFactor level_factor_detail(const CoinLevel& level, const Int& m);
std::complex<double> level_factor(const CoinLevel& level, const Int& m);

// Smallest truncation depth whose certified dropped mass fits the eps budget,
// together with the bound that certifies it.
struct TruncationPlan {
    unsigned T = 0;
    Rational tail_sum;
};
TruncationPlan plan_truncation(const CoinMeasure& measure, const Int& m, double eps);

FourierValue fourier_rho(const CoinMeasure& measure, const Int& m, double eps);
FourierValue fourier_sigma(const CoinMeasure& measure, const Int& m, double eps);

struct CorrelationRow {
    unsigned j = 0;
    unsigned k = 0;
    Int m;
    double sigma_shifted = 0.0;
    double sigma_target = 0.0;
    double error = 0.0;
    double radius = 0.0;
};

struct CorrelationTable {
    std::vector<CorrelationRow> rows;
};

CorrelationTable verify_profile(const CoinMeasure& measure, const SequenceFamily& family,
                                const AnchorSequence& anchor, const std::vector<int>& xi,
                                unsigned K, const Int& m_lo, const Int& m_hi, double eps,
                                unsigned jobs = 1);

double wiener_average(const CoinMeasure& measure, unsigned M, double eps, unsigned jobs = 1);

// Reference evaluator: walks the digit space directly, no closed forms. The
// histogram collapses digit strings with equal torus value so coefficient
// sweeps reuse the enumeration.
struct ValueHistogram {
    std::vector<std::pair<Rational, unsigned long>> atoms;
    unsigned long total = 0;
};
ValueHistogram enumerate_values(const CoinMeasure& measure);
double sigma_from_histogram(const ValueHistogram& hist, const Int& m);
double sigma_by_enumeration(const CoinMeasure& measure, const Int& m);

}  // namespace specmix
