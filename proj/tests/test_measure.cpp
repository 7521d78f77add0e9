#include <doctest.h>

#include <functional>

#include "dyadic/exponents.hpp"

using namespace dyadic;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_input;
}

}  // namespace

TEST_CASE("cube masses aggregate leaf masses") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 1.0});
  CHECK(m.cube_mass(g.root()) == 2.0);
  CHECK(m.cube_mass(CubeId{1, 0}) == 1.0);
  CHECK(m.total() == 2.0);

  LeafMeasure zero(g, {0.0, 0.0});
  for (CubeId q : g.all_cubes()) CHECK(zero.cube_mass(q) == 0.0);
}

TEST_CASE("measure construction validates input") {
  Grid g(1, 1);
  CHECK(code_of([&] { LeafMeasure(g, {1.0}); }) == Errc::invalid_input);
  CHECK(code_of([&] { LeafMeasure(g, {1.0, -1.0}); }) == Errc::invalid_input);
}

TEST_CASE("fractional sets carve out partial leaves") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 1.0});

  CHECK(m.set_mass(full_cube_set<double>(g, g.root())) == m.cube_mass(g.root()));
  CHECK(m.set_mass(full_cube_set<double>(g, CubeId{1, 1})) == 1.0);

  FractionalSet half;
  half.set(0, 0.5);
  CHECK(m.set_mass(half) == 0.5);
  CHECK(m.set_mass(FractionalSet{}) == 0.0);

  FractionalSet bad;
  bad.fractions[0] = 1.5;
  CHECK(code_of([&] { validate_fractional_set(g, bad); }) == Errc::invalid_input);
  FractionalSet outside;
  outside.fractions[7] = 0.5;
  CHECK(code_of([&] { validate_fractional_set(g, outside); }) ==
        Errc::invalid_input);
}

TEST_CASE("setting a zero fraction removes the leaf") {
  FractionalSet set;
  set.set(3, 0.25);
  CHECK(set.fraction(3) == 0.25);
  set.set(3, 0.0);
  CHECK(set.empty());
}

TEST_CASE("allocations must stay disjoint and inside their cubes") {
  Grid g(1, 1);
  DisjointAllocation ok;
  ok.sets[g.root()].set(0, 0.5);
  ok.sets[CubeId{1, 0}].set(0, 0.5);
  validate_allocation(g, ok);

  DisjointAllocation overlap;
  overlap.sets[g.root()].set(0, 0.75);
  overlap.sets[CubeId{1, 0}].set(0, 0.75);
  CHECK(code_of([&] { validate_allocation(g, overlap); }) ==
        Errc::overlapping_allocation);
  validate_allocation(g, overlap, 0.5);

  DisjointAllocation leak;
  leak.sets[CubeId{1, 1}].set(0, 0.5);
  CHECK(code_of([&] { validate_allocation(g, leak); }) == Errc::invalid_input);
}

TEST_CASE("integration against a leaf measure") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 1.0});
  CHECK(integrate(LeafFunction(g, 1.0), m, g.root()) == 2.0);
  CHECK(integrate(LeafFunction(g, 0.0), m) == 0.0);

  Grid g2(1, 2);
  LeafMeasure ones(g2, {1.0, 1.0, 1.0, 1.0});
  CHECK(integrate(LeafFunction({1, 2, 3, 4}), ones, CubeId{1, 1}) == 7.0);
  CHECK(integrate(LeafFunction({1, 2, 3, 4}), ones) == 10.0);
}

TEST_CASE("averages divide out the cube mass") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 1.0});
  CHECK(average(LeafFunction(g, 3.5), m, g.root()) == 3.5);
  CHECK(average(LeafFunction({1, 3}), m, g.root()) == 2.0);

  LeafMeasure null_half(g, {0.0, 1.0});
  CHECK(code_of([&] { average(LeafFunction(g, 1.0), null_half, CubeId{1, 0}); }) ==
        Errc::zero_mass_cube);
}

TEST_CASE("lp norms") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 1.0});
  for (double p : {1.0, 2.0, 3.5})
    CHECK(lp_norm(LeafFunction(g, 1.0), p, m) ==
          doctest::Approx(std::pow(2.0, 1.0 / p)).epsilon(1e-14));
  CHECK(lp_norm(LeafFunction({2, 0}), 2.0, m) == 2.0);
  LeafMeasure skew(g, {0.0, 1.0});
  CHECK(lp_norm(LeafFunction({5, 1}), infinity, skew) == 1.0);
  CHECK(lp_norm(LeafFunction(g, -1.0), 1.0, m) == 2.0);
}

TEST_CASE("restricting a measure scales leaf masses") {
  Grid g(1, 1);
  LeafMeasure m(g, {1.0, 2.0});
  FractionalSet set;
  set.set(0, 0.5);
  LeafMeasure r = restrict_measure(m, set);
  CHECK(r.leaf_mass(0) == 0.5);
  CHECK(r.leaf_mass(1) == 0.0);
  CHECK(r.total() == 0.5);
}

TEST_CASE("function validation") {
  Grid g(1, 1);
  CHECK(code_of([&] { check_function(g, LeafFunction({1.0})); }) ==
        Errc::invalid_input);
  CHECK(code_of([&] { check_nonnegative(LeafFunction({1.0, -0.5})); }) ==
        Errc::invalid_input);
  CHECK(code_of([&] {
          check_function(g, LeafFunction({1.0, infinity}));
        }) == Errc::invalid_input);
}

TEST_CASE("conjugate exponents") {
  CHECK(conjugate(1.0) == infinity);
  CHECK(conjugate(infinity) == 1.0);
  CHECK(conjugate(2.0) == 2.0);
  CHECK(conjugate(3.0) == 1.5);
  CHECK(code_of([] { conjugate(0.5); }) == Errc::invalid_input);
}

TEST_CASE("derived exponents") {
  Exponents e = Exponents::make(3.0, 2.0, 2.0);
  CHECK(e.r == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(e.p_conj == 1.5);
  CHECK(e.q_conj == 2.0);
  CHECK(e.s_conj == 2.0);
  CHECK(e.s_tilde == 1.0);
  CHECK(e.p_tilde == 1.5);
  CHECK(e.p_tilde_conj == 3.0);
  CHECK_FALSE(e.s_infinite());

  Exponents top = Exponents::make(3.0, 2.0, infinity);
  CHECK(top.s_conj == 1.0);
  CHECK(top.s_tilde == infinity);
  CHECK(top.s_infinite());

  CHECK(code_of([] { Exponents::make(2.0, 2.0, 2.0); }) == Errc::invalid_input);
  CHECK(code_of([] { Exponents::make(3.0, 1.0, 2.0); }) == Errc::invalid_input);
  CHECK(code_of([] { Exponents::make(3.0, 2.0, 1.5); }) == Errc::invalid_input);
  CHECK(code_of([] { Exponents::make(infinity, 2.0, 2.0); }) ==
        Errc::invalid_input);
}

TEST_CASE("powz treats exponent zero as one") {
  CHECK(powz(0.0, 0.0) == 1.0);
  CHECK(powz(5.0, 0.0) == 1.0);
  CHECK(powz(2.0, 3.0) == 8.0);
  CHECK(powz(4.0, 0.5) == 2.0);
}
