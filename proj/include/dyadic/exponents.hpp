#pragma once

#include "dyadic/measure.hpp"

namespace dyadic {

// Hoelder conjugate; x = 1 gives infinity and x = infinity gives 1.
double conjugate(double x);

// The exponent block (p, q, s) with 1 < q < p < infinity and q <= s <= infinity,
// together with every derived exponent the estimates use. s = infinity is a
// first-class value (the inner norm becomes a sup).
struct Exponents {
  double p = 0;
  double q = 0;
  double s = 0;

  double r = 0;        // 1/r = 1/q - 1/p
  double p_conj = 0;   // p'
  double q_conj = 0;   // q'
  double s_conj = 0;   // s' (1 when s = infinity)
  double s_tilde = 0;  // s/q
  double p_tilde = 0;  // p/q
  double p_tilde_conj = 0;

  static Exponents make(double p, double q, double s);

  bool s_infinite() const { return s == infinity; }
};

// x^e with the convention x^0 = 1 for every x (including 0), used for the
// degenerate endpoint exponents.
double powz(double x, double e);

}  // namespace dyadic
