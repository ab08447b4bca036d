#pragma once
#include <optional>
#include <variant>
#include <vector>

#include "specmix/exact.hpp"
#include "specmix/linalg.hpp"

namespace specmix {

// v(x) = a0 + a1 x + ... + ad x^d. The constant term lives apart because
// the independence tests work on v(x) - v(0).
struct IntPolynomial {
  Int constant;             // a0
  std::vector<Int> coeffs;  // a1..ad, trailing zeros trimmed

  unsigned degree() const { return (unsigned)coeffs.size(); }
  Int eval(const Int& n) const;
  bool is_zero() const { return constant == 0 && coeffs.empty(); }
};

// a0-first coefficient list, matching the wire format [a0, a1, ..., ad]
IntPolynomial make_polynomial(const std::vector<Int>& coeffs);

struct TabulatedSequence {
  std::vector<Int> values;  // phi(1) .. phi(bound)
};

using SequenceMember = std::variant<IntPolynomial, TabulatedSequence>;

struct SequenceFamily {
  std::vector<SequenceMember> members;

  unsigned size() const { return (unsigned)members.size(); }
  bool all_polynomial() const;
  bool zero_constants() const;
  // largest index every member can evaluate (table bound; unbounded for
  // polynomial-only families)
  std::optional<Int> index_bound() const;
};

SequenceFamily family_of_polynomials(const std::vector<std::vector<Int>>& coeff_lists);

// phi_j(n), 1-based j
Int eval_member(const SequenceFamily& fam, unsigned j, const Int& n);

// rows = coefficient vectors a_{j,1..d}; requires all members polynomial
// with zero constant term
IntMatrix coefficient_matrix(const SequenceFamily& fam);

struct IndependenceReport {
  bool independent = false;
  bool conclusive = false;  // tabulated members only get an empirical verdict
  std::optional<std::vector<Int>> witness;
};

IndependenceReport is_asymptotically_independent(const SequenceFamily& fam);

// Phi(k) = max_j |phi_j(k)| + 1
Int phi_bound(const SequenceFamily& fam, const Int& k);

// Greedy chain of indices along which every combination sum_j a_j phi_j,
// 0 < ||a||_inf <= box, stays strictly monotone. Polynomial combinations
// move in the direction of their leading coefficient; tabulated ones lock
// direction at their first strict move.
class IndependenceChain {
public:
  IndependenceChain(const SequenceFamily& fam, unsigned box);

  // appends n if every combination stays strictly monotone; returns success
  bool try_extend(const Int& n);
  const std::vector<Int>& indices() const { return indices_; }

private:
  const SequenceFamily& fam_;
  std::vector<std::vector<Int>> combos_;  // canonical half box, nonzero
  std::vector<int> dir_;                  // -1/0/+1 per combo (0 = unlocked)
  std::vector<Int> last_;                 // last accepted combination values
  std::vector<Int> indices_;

  Int combo_value(size_t ci, const Int& n) const;
};

std::vector<Int> strongly_independent_subsequence(const SequenceFamily& fam,
                                                  unsigned coeff_box,
                                                  const Int& horizon);

}  // namespace specmix
