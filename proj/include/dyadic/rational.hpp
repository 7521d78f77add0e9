#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "dyadic/errors.hpp"

namespace dyadic {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// The exact value of the binary double (no decimal rounding).
Rational rational_from_double(double x);

// Accepts "a/b" with integer a, b as well as plain integer, decimal and
// scientific literals ("3", "-0.125", "2.5e-3"); decimals parse exactly.
Rational parse_rational(std::string_view text);

std::string rational_to_string(const Rational& x);

}  // namespace dyadic
