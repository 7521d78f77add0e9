#include "dyadic/exponents.hpp"

#include <cmath>

namespace dyadic {

double conjugate(double x) {
  if (x == infinity) return 1.0;
  require(x >= 1.0, Errc::invalid_input, "conjugate exponent needs x >= 1");
  if (x == 1.0) return infinity;
  return x / (x - 1.0);
}

Exponents Exponents::make(double p, double q, double s) {
  require(std::isfinite(p) && std::isfinite(q), Errc::invalid_input,
          "p and q must be finite");
  require(1.0 < q && q < p, Errc::invalid_input,
          "exponents must satisfy 1 < q < p");
  require(s >= q, Errc::invalid_input, "exponents must satisfy s >= q");

  Exponents e;
  e.p = p;
  e.q = q;
  e.s = s;
  e.r = 1.0 / (1.0 / q - 1.0 / p);
  e.p_conj = conjugate(p);
  e.q_conj = conjugate(q);
  e.s_conj = conjugate(s);
  e.s_tilde = s == infinity ? infinity : s / q;
  e.p_tilde = p / q;
  e.p_tilde_conj = conjugate(e.p_tilde);
  return e;
}

double powz(double x, double e) {
  if (e == 0.0) return 1.0;
  return std::pow(x, e);
}

}  // namespace dyadic
