#pragma once

#include <vector>

#include "specmix/anchor.hpp"
#include "specmix/coin.hpp"
#include "specmix/exact.hpp"
#include "specmix/sequences.hpp"

namespace specmix {

// Prime data behind the linear families phi_j(n) = q_j n: one prime per
// nonempty proper subset of {1..N}, plus M, the least prime past all of
// them, appended as the last entry of primes. The extended index range
// 0..2^N-1 adds the full set (p = 1) at 0 and the empty set (p = M) at the
// top.
struct PrimeFamilySpec {
    unsigned N = 0;
    std::vector<unsigned long> subsets;  // A_1..A_{2^N-2}; bit j-1 set <=> j in A_n
    std::vector<Int> primes;             // p_1..p_{2^N-2}, then M
    std::vector<Int> q;                  // q_j = prod over subsets containing j
};

// Fixes the canonical subset enumeration (ascending characteristic bitmask),
// checks the primes, finds M, and computes the exponents q_j.
PrimeFamilySpec prime_exponents(unsigned N, const std::vector<Int>& primes);

// p_n over the extended index range; c_n = max(p_n - 1, 1) is the top digit
Int index_prime(const PrimeFamilySpec& spec, unsigned long n_index);
Int index_digit_top(const PrimeFamilySpec& spec, unsigned long n_index);

// xi_j = 1 - [j in A_n], the mixing profile attached to index n
std::vector<int> xi_profile(const PrimeFamilySpec& spec, unsigned long n_index);

// the polynomial family phi_j(n) = q_j n
SequenceFamily prime_family(const PrimeFamilySpec& spec);

// n_k = P^(2k) k! with P the product of all primes including M
AnchorSequence prime_anchor(const PrimeFamilySpec& spec, unsigned K);

// |(1/(c+1)) sum_{r=0..c} e^(2 pi i q r / p)|^2. With c = max(p-1, 1) the
// geometric sum collapses to the indicator of p | q.
double character_average(const Int& q, const Int& p, const Int& c);

// levels C_t = 1/(p_n n_t) over the anchor entries, alphabet c_n + 1,
// factorial-product tail
CoinMeasure build_coin_measure_prime(const PrimeFamilySpec& spec, unsigned long n_index,
                                     const AnchorSequence& anchor, unsigned T);

}  // namespace specmix
