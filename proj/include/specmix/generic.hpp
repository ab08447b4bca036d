#pragma once
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "specmix/anchor.hpp"
#include "specmix/coin.hpp"
#include "specmix/sequences.hpp"

namespace specmix {

// Exponential-sum survey of the torus orbit r -> (phi_j(r) * alpha_j).
struct WeylReport {
  unsigned long M = 0;
  // one entry per nonzero integer vector a with |a|_inf <= box, in
  // lexicographic order; value = (1/M) sum_r e(sum_j a_j phi_j(r) alpha_j)
  std::vector<std::pair<std::vector<Int>, std::complex<double>>> sums;
  // max over coordinates j of the 1D star discrepancy of {phi_j(r) alpha_j}
  double discrepancy = 0.0;
  double max_abs = 0.0;
};

// (1/M) sum_{r=1..M} e(2 pi i (sum_j a_j phi_j(r)) alpha); phases are exact
// rationals before the single float rounding per term
std::complex<double> weyl_sum(const SequenceFamily& family, const std::vector<Int>& a,
                              const Rational& alpha, unsigned long M);

WeylReport equidistribution_report(const SequenceFamily& family,
                                   const std::vector<Rational>& alphas, unsigned long M,
                                   unsigned box, unsigned jobs = 1);

// profile key ("0101...") -> one frequency per anchor entry
using AlphaMap = std::map<std::string, std::vector<Rational>>;

// Inductive search for a common anchor (n_k) and per-profile frequencies
// alpha_k, all conditions exact:
//   interval      0 < alpha_k <= 1 / (2^k * Phi(n_{k-1})), n_0 = 1
//   phase-target  || phi_l(n_k) alpha_k / 2 - b_l / 2 || < 1/k
//   phase-carry   || phi_l(n_k) alpha_{k0} / 2 || < 1/k^2   for k0 < k
// plus membership in a strongly independent subsequence (coefficient box 3).
// alpha_k is drawn seed-pinned with denominator 2^64 * 2^k * Phi(n_{k-1});
// candidates for n_k run over strided multiples of lcm(2 den alpha_{k0}) so
// the carry condition lands exactly on zero for zero-constant polynomial
// families while the slowest phase coordinate still sweeps the torus within
// the scan window. A failed scan redraws alpha (retry cap), then reports
// scan-exhausted.
std::pair<AnchorSequence, AlphaMap> search_alpha_anchor(const SequenceFamily& family,
                                                        const std::vector<std::string>& profiles,
                                                        unsigned K, unsigned long scan_bound,
                                                        std::uint64_t rng_seed);

// recomputes every certificate item from (family, alphas, entries) and
// compares exactly
bool verify_alpha_anchor(const SequenceFamily& family, const AnchorSequence& anchor,
                         const AlphaMap& alphas);

// levels (alpha_t, 2) with no unmaterialized tail: the list is the whole
// measure, so transforms are exact up to float rounding
CoinMeasure build_coin_measure_general(const std::vector<Rational>& alphas);

// same levels, but carrying the interval envelope 1/(2^t Phi(n_{t-1})) as a
// certified bound on every unmaterialized level of the full construction;
// needs the anchor for the Phi values (one lookahead entry past the levels)
CoinMeasure build_coin_measure_general(const SequenceFamily& family,
                                       const std::vector<Rational>& alphas,
                                       const AnchorSequence& anchor);

// max over all 2^T digit vectors of || phi_l(n_k) f(w) - b_l w(k)/2 ||
// with f(w) = sum_t w(t) alpha_t / 2, exact
Rational chain_deviation_general(const SequenceFamily& family, const std::vector<Rational>& alpha,
                                 const std::vector<int>& xi, const AnchorSequence& anchor,
                                 unsigned l, unsigned k, unsigned T);

// tail(k) + 1/k + (k-1)/k^2 with tail(k) = |phi_l(n_k)| sum_{k<t<=T} alpha_t/2
Rational chain_bound_general(const SequenceFamily& family, const std::vector<Rational>& alpha,
                             const AnchorSequence& anchor, unsigned l, unsigned k, unsigned T);

}  // namespace specmix
