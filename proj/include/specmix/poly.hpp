#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "specmix/anchor.hpp"
#include "specmix/coin.hpp"
#include "specmix/exact.hpp"
#include "specmix/linalg.hpp"
#include "specmix/sequences.hpp"

namespace specmix {

struct MixingProfile {
    unsigned N = 0;
    std::vector<int> xi;
    std::vector<Rational> lambda;
    std::vector<Rational> b;
};

MixingProfile make_profile(const std::vector<int>& xi);
MixingProfile make_lambda_profile(const std::vector<Rational>& lambda);

std::string xi_key(const std::vector<int>& xi);
std::vector<int> xi_from_key(const std::string& key);

// solution to D x = b with zero-filled free variables; falls back to a basic
// solution when zero-filling collapses to the zero vector
std::vector<Rational> solve_rational(const IntMatrix& D, const std::vector<Rational>& b);

using SolutionsMap = std::map<std::string, std::vector<Rational>>;

// Greedy scan over the base sequence (default m_l = l!) for K entries
// satisfying, across every solution vector:
//   initial-bound   d * n0 * |x_s| < n_1
//   integrality     x_s * n_k integer
//   divisibility    2 d n_{k-1}^{d+1} divides n_k   (k >= 2)
// A custom base must satisfy l! | base(l); it is checked per candidate.
AnchorSequence choose_anchor_poly(const SequenceFamily& family, const SolutionsMap& solutions,
                                  unsigned K, const Int& n0, unsigned long scan_bound,
                                  const std::function<Int(unsigned long)>& base = {});

bool verify_anchor_poly(const SequenceFamily& family, const SolutionsMap& solutions,
                        const AnchorSequence& anchor);

CoinMeasure build_coin_measure_poly(const std::vector<Rational>& x, const AnchorSequence& anchor,
                                    unsigned T);

// Exact worst-case deviation, over all 2^T digit vectors, of the weighted
// digit average from its target at anchor index k, family member j. The digit
// weights use the raw sums x_s / n_t^s, not their torus reductions.
Rational chain_deviation_poly(const SequenceFamily& family, const std::vector<Rational>& x,
                              const AnchorSequence& anchor, unsigned j, unsigned k, unsigned T);

// the matching certified bound: (sum_l |a_{j,l}|) * 2 n_1 / (n_k - 1)
Rational chain_bound_poly(const SequenceFamily& family, unsigned j, const AnchorSequence& anchor,
                          unsigned k);

}  // namespace specmix
