#include "dyadic/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

namespace dyadic {

namespace mp = boost::multiprecision;

Rational rational_from_double(double x) {
  require(std::isfinite(x), Errc::invalid_input,
          "cannot convert a non-finite value to a rational");
  return Rational(x);
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// The cpp_int string constructor treats a leading 0 as an octal prefix, so
// digit strings must be stripped before conversion.
mp::cpp_int digits_to_int(std::string_view s) {
  auto nz = s.find_first_not_of('0');
  if (nz == std::string_view::npos) return 0;
  return mp::cpp_int{std::string(s.substr(nz))};
}

mp::cpp_int parse_int(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  require(all_digits(s), Errc::invalid_input, "malformed integer literal");
  mp::cpp_int value = digits_to_int(s);
  return negative ? -value : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  require(!text.empty(), Errc::invalid_input, "empty numeric literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    mp::cpp_int num = parse_int(text.substr(0, slash));
    mp::cpp_int den = parse_int(text.substr(slash + 1));
    require(den != 0, Errc::invalid_input, "rational literal with zero denominator");
    return Rational(num, den);
  }

  std::string_view s = text;
  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }

  long long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view tail = s.substr(e + 1);
    require(!tail.empty(), Errc::invalid_input, "malformed exponent");
    exponent = parse_int(tail).convert_to<long long>();
    s = s.substr(0, e);
  }

  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view head = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    require(!head.empty() || !frac.empty(), Errc::invalid_input,
            "malformed decimal literal");
    require(head.empty() || all_digits(head), Errc::invalid_input,
            "malformed decimal literal");
    require(frac.empty() || all_digits(frac), Errc::invalid_input,
            "malformed decimal literal");
    digits = std::string(head) + std::string(frac);
    exponent -= static_cast<long long>(frac.size());
  } else {
    require(all_digits(s), Errc::invalid_input, "malformed numeric literal");
    digits = std::string(s);
  }

  Rational value(digits_to_int(digits));
  if (exponent > 0)
    value *= Rational(mp::pow(mp::cpp_int(10), static_cast<unsigned>(exponent)));
  else if (exponent < 0)
    value /= Rational(mp::pow(mp::cpp_int(10), static_cast<unsigned>(-exponent)));
  return negative ? -value : value;
}

std::string rational_to_string(const Rational& x) {
  return x.str();
}

}  // namespace dyadic
