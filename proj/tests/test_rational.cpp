#include <doctest.h>

#include "dyadic/rational.hpp"

using namespace dyadic;

TEST_CASE("decimal literals parse exactly") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK(parse_rational("2e-3") == Rational(1, 500));
  CHECK(parse_rational("2.5e-3") == Rational(1, 400));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("+12") == 12);
  CHECK(parse_rational("1.5e2") == 150);
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK(parse_rational("2.") == 2);
}

TEST_CASE("fraction literals") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("4/6") == Rational(2, 3));
  CHECK(parse_rational("-7/2") == Rational(-7, 2));
}

TEST_CASE("malformed literals are rejected") {
  for (const char* bad : {"", "abc", "1..2", "1/0", "1e", "--3", "0x10"}) {
    CAPTURE(bad);
    try {
      parse_rational(bad);
      FAIL_CHECK("expected invalid_input for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_input);
    }
  }
}

TEST_CASE("doubles convert to their exact binary value") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(0.1) != Rational(1, 10));
  CHECK(to_double(rational_from_double(0.1)) == 0.1);
  CHECK(rational_from_double(-3.0) == -3);
  CHECK_THROWS_AS(rational_from_double(1.0 / 0.0), Error);
}

TEST_CASE("string round trip") {
  CHECK(rational_to_string(Rational(1, 4)) == "1/4");
  CHECK(rational_to_string(Rational(3)) == "3");
  CHECK(parse_rational(rational_to_string(Rational(-22, 7))) == Rational(-22, 7));
}
