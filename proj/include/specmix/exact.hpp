#pragma once
#include <gmpxx.h>

#include <complex>
#include <string>

#include "specmix/error.hpp"

namespace specmix {

using Int = mpz_class;
using Rational = mpq_class;

// reduced fraction with positive denominator
Rational make_rational(const Int& num, const Int& den);

struct TorusPoint {
  Rational value;  // 0 <= value < 1
};

// x - floor(x), exact
TorusPoint torus_reduce(const Rational& x);

// (m*c) mod 1 via ((m mod q)*p mod q)/q for c = p/q reduced; never forms m*c
TorusPoint torus_scale(const Int& m, const Rational& c);

// distance to the nearest integer, in [0, 1/2]
Rational dist_to_int(const Rational& x);

// e^{2 pi i x}. The one exact->float frontier: the argument is reduced
// exactly to [-1/8, 1/8] of a period before any double arithmetic, so the
// relative error stays within 4 machine epsilons.
std::complex<double> unit_phase(const TorusPoint& x);

// sin(pi x) / cos(pi x) with the same exact range reduction (arguments are
// folded in rational arithmetic, trig sees |arg| <= pi/4)
double sin_pi(const Rational& x);
double cos_pi(const Rational& x);

// smallest k/2^bits >= x; requires x >= 0
Rational dyadic_upper(const Rational& x, unsigned bits = 128);

// "p/q" (or "p") -> Rational; throws parse-error on malformed input
Rational rational_from_string(const std::string& s);
// always "p/q", including q = 1
std::string rational_to_string(const Rational& x);

double to_double(const Rational& x);

}  // namespace specmix
