#pragma once

#include <cstdint>
#include <vector>

#include "specmix/exact.hpp"
#include "specmix/poly.hpp"

namespace specmix {

// Measure-preserving map of [0,1) at resolution 2^-G: a permutation of the
// 2^G equal cells. Immutable once built.
struct GridAutomorphism {
    unsigned G = 0;
    std::vector<std::uint32_t> fwd;
    std::vector<std::uint32_t> inv;
    unsigned long cells() const { return 1ul << G; }
};

GridAutomorphism make_automorphism(unsigned G, std::vector<std::uint32_t> perm);
GridAutomorphism identity_automorphism(unsigned G);

// [index / 2^rank, (index+1) / 2^rank)
struct DyadicInterval {
    unsigned rank = 1;
    unsigned long index = 0;
};

// x -> x + 2^-rank as a cell permutation
GridAutomorphism cyclic_permutation(unsigned rank, unsigned G);

// sum_{l=1..L} 4^-l sum_{E rank l} mu(TE symdiff SE), exact; the dropped
// ranks contribute at most dyadic_metric_tail(L) to the untruncated metric
Rational dyadic_metric(const GridAutomorphism& T, const GridAutomorphism& S, unsigned L);
Rational dyadic_metric_tail(unsigned L);

// S^-1 . T . S
GridAutomorphism conjugate(const GridAutomorphism& T, const GridAutomorphism& S);

// mu(E intersect T^-n F), n may be any integer (negative uses the inverse)
Rational correlation(const GridAutomorphism& T, const DyadicInterval& E,
                     const DyadicInterval& F, const Int& n);

// Blend of N+1 pieces at resolution L: slab t of every rank-l' interval
// carries the conjugated copy S_t T_t S_t^-1, where S_t compresses the
// interval onto its slab [lambda_{t-1}, lambda_t) (lambda_0 = 0,
// lambda_{N+1} = 1). Output resolution G = L + log2(lambda denominator);
// every output cell moves by translation.
GridAutomorphism glue(const MixingProfile& profile, const std::vector<GridAutomorphism>& pieces,
                      unsigned rank);

// max over E, F of rank <= test_rank and n in n_list of
// | mu(E ^ glued^-n F) - sum_t delta_t mu(E ^ T_t^-n F) |, exact; 0 whenever
// test_rank <= the gluing rank
Rational verify_convex_identity(const GridAutomorphism& glued,
                                const std::vector<GridAutomorphism>& pieces,
                                const MixingProfile& profile, unsigned rank, unsigned test_rank,
                                const std::vector<Int>& n_list);

struct MetricBoundReport {
    bool ok = false;
    Rational lhs;
    Rational rhs;
    Rational slack;
};

// checks d_{<=rank}(R, glued) <= sum_t delta_t d_{<=rank}(R_L, T_t) for an R
// that translates whole rank-l' intervals; R_L is R's interval permutation
// replayed at the pieces' resolution
MetricBoundReport verify_metric_bound(const GridAutomorphism& R, const GridAutomorphism& glued,
                                      const std::vector<GridAutomorphism>& pieces,
                                      const MixingProfile& profile, unsigned rank);

}  // namespace specmix
