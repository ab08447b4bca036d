#include "specmix/sequences.hpp"

#include <algorithm>

namespace specmix {

Int IntPolynomial::eval(const Int& n) const {
  Int acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * n + *it;
  return acc * n + constant;
}

IntPolynomial make_polynomial(const std::vector<Int>& coeffs) {
  IntPolynomial p;
  p.constant = coeffs.empty() ? Int(0) : coeffs[0];
  for (size_t i = 1; i < coeffs.size(); ++i) p.coeffs.push_back(coeffs[i]);
  while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
  return p;
}

bool SequenceFamily::all_polynomial() const {
  for (const auto& m : members)
    if (!std::holds_alternative<IntPolynomial>(m)) return false;
  return true;
}

bool SequenceFamily::zero_constants() const {
  for (const auto& m : members) {
    const auto* p = std::get_if<IntPolynomial>(&m);
    if (p && p->constant != 0) return false;
  }
  return true;
}

std::optional<Int> SequenceFamily::index_bound() const {
  std::optional<Int> bound;
  for (const auto& m : members) {
    const auto* t = std::get_if<TabulatedSequence>(&m);
    if (!t) continue;
    Int b((unsigned long)t->values.size());
    if (!bound || b < *bound) bound = b;
  }
  return bound;
}

SequenceFamily family_of_polynomials(const std::vector<std::vector<Int>>& coeff_lists) {
  SequenceFamily fam;
  for (const auto& c : coeff_lists) fam.members.emplace_back(make_polynomial(c));
  return fam;
}

Int eval_member(const SequenceFamily& fam, unsigned j, const Int& n) {
  if (j < 1 || j > fam.size())
    fail("index-out-of-range", "member " + std::to_string(j) + " of " +
                                   std::to_string(fam.size()));
  const auto& m = fam.members[j - 1];
  if (const auto* p = std::get_if<IntPolynomial>(&m)) return p->eval(n);
  const auto& t = std::get<TabulatedSequence>(m);
  if (n < 1 || n > Int((unsigned long)t.values.size()))
    fail("table-bound-exceeded",
         "index " + n.get_str() + " outside table of size " +
             std::to_string(t.values.size()));
  return t.values[mpz_get_ui(n.get_mpz_t()) - 1];
}

IntMatrix coefficient_matrix(const SequenceFamily& fam) {
  size_t d = 0;
  for (const auto& m : fam.members) {
    const auto* p = std::get_if<IntPolynomial>(&m);
    if (!p) fail("non-polynomial-member", "coefficient matrix needs polynomials");
    if (p->constant != 0)
      fail("nonzero-constant-term", "coefficient matrix needs zero constant terms");
    d = std::max(d, (size_t)p->degree());
  }
  IntMatrix out;
  for (const auto& m : fam.members) {
    const auto& p = std::get<IntPolynomial>(m);
    std::vector<Int> row(d, Int(0));
    for (size_t s = 0; s < p.coeffs.size(); ++s) row[s] = p.coeffs[s];
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

// nonzero vectors in [-box, box]^n with first nonzero entry positive
std::vector<std::vector<Int>> canonical_box(unsigned n, unsigned box) {
  std::vector<std::vector<Int>> out;
  std::vector<long> a(n, -(long)box);
  while (true) {
    long first = 0;
    for (unsigned i = 0; i < n; ++i)
      if (a[i] != 0) {
        first = a[i];
        break;
      }
    if (first > 0) {
      std::vector<Int> v(n);
      for (unsigned i = 0; i < n; ++i) v[i] = a[i];
      out.push_back(std::move(v));
    }
    unsigned i = 0;
    while (i < n && a[i] == (long)box) a[i++] = -(long)box;
    if (i == n) break;
    ++a[i];
  }
  return out;
}

// centered coefficient rows (constant terms dropped), any polynomial family
IntMatrix centered_matrix(const SequenceFamily& fam) {
  size_t d = 0;
  for (const auto& m : fam.members)
    d = std::max(d, (size_t)std::get<IntPolynomial>(m).degree());
  IntMatrix out;
  for (const auto& m : fam.members) {
    const auto& p = std::get<IntPolynomial>(m);
    std::vector<Int> row(d, Int(0));
    for (size_t s = 0; s < p.coeffs.size(); ++s) row[s] = p.coeffs[s];
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

IndependenceReport is_asymptotically_independent(const SequenceFamily& fam) {
  if (fam.members.empty()) fail("empty-family", "no members");
  IndependenceReport rep;
  if (fam.all_polynomial()) {
    IntMatrix d = centered_matrix(fam);
    rep.conclusive = true;
    if (matrix_rank(d) == fam.size()) {
      rep.independent = true;
    } else {
      rep.independent = false;
      rep.witness = left_kernel_vector(d);
    }
    return rep;
  }
  // tabulated members: boxed finite-horizon check, non-conclusive
  rep.conclusive = false;
  Int bound = *fam.index_bound();
  if (bound > 1000) bound = 1000;
  auto combos = canonical_box(fam.size(), 3);
  for (const auto& a : combos) {
    bool constant = true;
    Int first;
    for (Int n = 1; n <= bound; ++n) {
      Int v(0);
      for (unsigned j = 0; j < fam.size(); ++j)
        v += a[j] * eval_member(fam, j + 1, n);
      if (n == 1)
        first = v;
      else if (v != first) {
        constant = false;
        break;
      }
    }
    if (constant) {
      rep.independent = false;
      rep.witness = a;
      return rep;
    }
  }
  rep.independent = true;
  return rep;
}

Int phi_bound(const SequenceFamily& fam, const Int& k) {
  Int best(0);
  for (unsigned j = 1; j <= fam.size(); ++j) {
    Int v = eval_member(fam, j, k);
    if (v < 0) v = -v;
    if (v > best) best = v;
  }
  return best + 1;
}

IndependenceChain::IndependenceChain(const SequenceFamily& fam, unsigned box)
    : fam_(fam), combos_(canonical_box(fam.size(), box)) {
  dir_.assign(combos_.size(), 0);
  last_.assign(combos_.size(), Int(0));
  if (fam.all_polynomial()) {
    // eventual direction = sign of the combination's leading coefficient
    for (size_t ci = 0; ci < combos_.size(); ++ci) {
      size_t d = 0;
      for (const auto& m : fam.members)
        d = std::max(d, (size_t)std::get<IntPolynomial>(m).degree());
      std::vector<Int> c(d, Int(0));
      for (unsigned j = 0; j < fam.size(); ++j) {
        const auto& p = std::get<IntPolynomial>(fam.members[j]);
        for (size_t s = 0; s < p.coeffs.size(); ++s)
          c[s] += combos_[ci][j] * p.coeffs[s];
      }
      while (!c.empty() && c.back() == 0) c.pop_back();
      if (!c.empty()) dir_[ci] = c.back() > 0 ? 1 : -1;
      // empty: combination constant, can never move; extensions will fail
    }
  }
}

Int IndependenceChain::combo_value(size_t ci, const Int& n) const {
  Int v(0);
  for (unsigned j = 0; j < fam_.size(); ++j)
    v += combos_[ci][j] * eval_member(fam_, j + 1, n);
  return v;
}

bool IndependenceChain::try_extend(const Int& n) {
  if (!indices_.empty() && n <= indices_.back()) return false;
  std::vector<Int> vals(combos_.size());
  for (size_t ci = 0; ci < combos_.size(); ++ci) vals[ci] = combo_value(ci, n);
  if (!indices_.empty()) {
    for (size_t ci = 0; ci < combos_.size(); ++ci) {
      int step = vals[ci] > last_[ci] ? 1 : (vals[ci] < last_[ci] ? -1 : 0);
      if (step == 0) return false;
      if (dir_[ci] != 0 && step != dir_[ci]) return false;
    }
  }
  for (size_t ci = 0; ci < combos_.size(); ++ci) {
    if (!indices_.empty() && dir_[ci] == 0)
      dir_[ci] = vals[ci] > last_[ci] ? 1 : -1;
    last_[ci] = vals[ci];
  }
  indices_.push_back(n);
  return true;
}

std::vector<Int> strongly_independent_subsequence(const SequenceFamily& fam,
                                                  unsigned coeff_box,
                                                  const Int& horizon) {
  if (fam.members.empty()) fail("empty-family", "no members");
  if (fam.all_polynomial()) {
    // a combination that collapses to a constant can never become strictly
    // monotone; report it instead of scanning
    auto combos = canonical_box(fam.size(), coeff_box);
    IntMatrix d = centered_matrix(fam);
    for (const auto& a : combos) {
      bool zero = true;
      for (size_t col = 0; col < d[0].size() && zero; ++col) {
        Int s(0);
        for (unsigned j = 0; j < fam.size(); ++j) s += a[j] * d[j][col];
        if (s != 0) zero = false;
      }
      if (zero && !d[0].empty()) {
        std::string w;
        for (const auto& x : a) w += (w.empty() ? "" : ",") + x.get_str();
        fail("search-exhausted", "combination identically constant: a=(" + w + ")");
      }
    }
  }
  IndependenceChain chain(fam, coeff_box);
  for (Int n = 1; n <= horizon; ++n) chain.try_extend(n);
  Int min_len = horizon < 2 ? horizon : Int(2);
  if (Int((unsigned long)chain.indices().size()) < min_len)
    fail("search-exhausted", "no strictly monotone chain within horizon " +
                                 horizon.get_str());
  return chain.indices();
}

}  // namespace specmix
