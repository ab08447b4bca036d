#include "specmix/linalg.hpp"

namespace specmix {

unsigned matrix_rank(IntMatrix m) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  Int prev(1);
  unsigned rank = 0;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    for (size_t i = r + 1; i < rows; ++i) {
      for (size_t j = c + 1; j < cols; ++j) {
        Int t = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
    ++rank;
  }
  return rank;
}

namespace {

using RatMatrix = std::vector<std::vector<Rational>>;

// reduced row echelon form; returns pivot column per pivot row
std::vector<size_t> rref(RatMatrix& a) {
  size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    Rational inv = a[r][c];
    for (size_t j = c; j < cols; ++j) a[r][j] /= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<Int> normalize_integer_direction(const std::vector<Rational>& v) {
  Int lcm(1);
  for (const auto& x : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<Int> w(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    Rational s = v[i] * Rational(lcm);
    s.canonicalize();
    w[i] = s.get_num();
  }
  Int g(0);
  for (const auto& x : w) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1)
    for (auto& x : w) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  for (const auto& x : w) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : w) y = -y;
    break;
  }
  return w;
}

}  // namespace

std::optional<std::vector<Int>> left_kernel_vector(const IntMatrix& m) {
  if (m.empty()) return std::nullopt;
  size_t n = m.size(), d = m[0].size();
  // kernel of m^T (d x n)
  RatMatrix a(d, std::vector<Rational>(n));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < n; ++j) a[i][j] = Rational(m[j][i]);
  auto pivots = rref(a);
  if (pivots.size() == n) return std::nullopt;
  // first free column -> kernel vector
  std::vector<bool> is_pivot(n, false);
  for (size_t c : pivots) is_pivot[c] = true;
  size_t free_col = 0;
  while (free_col < n && is_pivot[free_col]) ++free_col;
  std::vector<Rational> v(n, Rational(0));
  v[free_col] = 1;
  for (size_t pr = 0; pr < pivots.size(); ++pr)
    v[pivots[pr]] = -a[pr][free_col];
  return normalize_integer_direction(v);
}

std::vector<Rational> solve_exact(const IntMatrix& m,
                                  const std::vector<Rational>& b) {
  size_t n = m.size();
  if (n == 0) fail("rank-deficient", "empty system");
  size_t d = m[0].size();
  if (matrix_rank(m) < n) fail("rank-deficient", "matrix rank below row count");
  RatMatrix a(n, std::vector<Rational>(d + 1));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) a[i][j] = Rational(m[i][j]);
    a[i][d] = b[i];
  }
  auto pivots = rref(a);
  std::vector<Rational> x(d, Rational(0));
  for (size_t pr = 0; pr < pivots.size(); ++pr) x[pivots[pr]] = a[pr][d];
  bool all_zero = true;
  for (const auto& xi : x)
    if (xi != 0) all_zero = false;
  if (all_zero && d > pivots.size()) {
    // basic solution with one free variable set to 1 (only reachable when
    // b = 0, which the profile vectors rule out; kept for contract
    // completeness)
    std::vector<bool> is_pivot(d, false);
    for (size_t c : pivots) is_pivot[c] = true;
    size_t free_col = 0;
    while (free_col < d && is_pivot[free_col]) ++free_col;
    x[free_col] = 1;
    for (size_t pr = 0; pr < pivots.size(); ++pr)
      x[pivots[pr]] = a[pr][d] - a[pr][free_col];
  }
  return x;
}

}  // namespace specmix
