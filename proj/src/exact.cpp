#include "specmix/exact.hpp"

#include <cmath>

namespace specmix {

Rational make_rational(const Int& num, const Int& den) {
  if (den == 0) fail("zero-denominator", "rational with denominator 0");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

TorusPoint torus_reduce(const Rational& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  Rational r = x - Rational(fl);
  r.canonicalize();
  return TorusPoint{r};
}

TorusPoint torus_scale(const Int& m, const Rational& c) {
  const Int& p = c.get_num();
  const Int& q = c.get_den();
  if (q == 1) return TorusPoint{Rational(0)};
  Int mr;
  mpz_mod(mr.get_mpz_t(), m.get_mpz_t(), q.get_mpz_t());
  Int r = mr * p;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t());
  return TorusPoint{make_rational(r, q)};
}

Rational dist_to_int(const Rational& x) {
  Rational t = torus_reduce(x).value;
  Rational u = 1 - t;
  return t <= u ? t : u;
}

double to_double(const Rational& x) { return mpq_get_d(x.get_mpq_t()); }

namespace {

// sin(pi y) for y in [0, 1/2], |trig argument| <= pi/4
double sin_pi_quadrant(const Rational& y) {
  static const Rational quarter(1, 4);
  if (y <= quarter) return std::sin(M_PI * mpq_get_d(y.get_mpq_t()));
  Rational z = Rational(1, 2) - y;
  return std::cos(M_PI * mpq_get_d(z.get_mpq_t()));
}

}  // namespace

double sin_pi(const Rational& x) {
  // sin(pi x): period 2, antiperiod 1. Reduce x mod 2 exactly.
  Int fl;
  Rational half_x = x / 2;
  mpz_fdiv_q(fl.get_mpz_t(), half_x.get_num().get_mpz_t(),
             half_x.get_den().get_mpz_t());
  Rational r = x - 2 * Rational(fl);
  r.canonicalize();  // r in [0, 2)
  double sign = 1.0;
  if (r >= 1) {
    r -= 1;
    sign = -1.0;
  }
  // r in [0, 1): fold to [0, 1/2]
  if (r > Rational(1, 2)) r = 1 - r;
  return sign * sin_pi_quadrant(r);
}

double cos_pi(const Rational& x) { return sin_pi(x + Rational(1, 2)); }

std::complex<double> unit_phase(const TorusPoint& x) {
  // e^{2 pi i t} = (cos(pi*2t), sin(pi*2t)); the folds inside sin_pi/cos_pi
  // are exact, so trig only ever sees |arg| <= pi/4.
  Rational y = 2 * x.value;
  return {cos_pi(y), sin_pi(y)};
}

Rational dyadic_upper(const Rational& x, unsigned bits) {
  if (x < 0) fail("negative-argument", "dyadic_upper needs x >= 0");
  Int num = x.get_num() << bits;
  Int k;
  mpz_cdiv_q(k.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
  Int den = Int(1) << bits;
  return make_rational(k, den);
}

Rational rational_from_string(const std::string& s) {
  if (s.empty()) fail("parse-error", "empty rational literal");
  Rational r;
  if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
    fail("parse-error", "bad rational literal '" + s + "'");
  if (r.get_den() == 0) fail("parse-error", "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace specmix
