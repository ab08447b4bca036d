#pragma once
#include <optional>
#include <vector>

#include "specmix/exact.hpp"

namespace specmix {

using IntMatrix = std::vector<std::vector<Int>>;

// exact rank over Q (fraction-free elimination, Bareiss pivoting)
unsigned matrix_rank(IntMatrix m);

// nonzero integer a with a^T * m = 0, normalized (gcd 1, first nonzero
// entry positive); nullopt when the rows are independent
std::optional<std::vector<Int>> left_kernel_vector(const IntMatrix& m);

// solve m * x = b exactly over Q; free variables set to zero, with a
// basic-solution fallback if that zeroes x out entirely.
// Throws rank-deficient when rank(m) < number of rows.
std::vector<Rational> solve_exact(const IntMatrix& m,
                                  const std::vector<Rational>& b);

}  // namespace specmix
