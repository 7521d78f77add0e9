#include <doctest.h>

#include <cmath>

#include "dyadic/conditions.hpp"

using namespace dyadic;

namespace {

const double kSeven6 = std::pow(2.0, 7.0 / 6.0);

struct Fixture {
  Grid grid{1, 1};
  LeafMeasure ones{grid, {1.0, 1.0}};
  CubeCoefficients lambda{{{grid.root(), 1.0}}};
  Exponents e = Exponents::make(3.0, 2.0, 2.0);

  CubeFamily root_family() const {
    CubeFamily f;
    f.cubes.insert(grid.root());
    return f;
  }
};

}  // namespace

TEST_CASE("first testing condition on a single cube") {
  Fixture w;
  CubeVector g{{{w.grid.root(), 1.0}}};
  Cond1Report report = cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                   w.root_family(), g);
  CHECK_FALSE(report.degenerate);
  CHECK(report.family_sparse);
  CHECK(report.skipped_components == 0);
  REQUIRE(report.terms.size() == 1);
  CHECK(report.value == doctest::Approx(kSeven6).epsilon(1e-13));

  Cond1Report zero = cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                 w.root_family(), CubeVector{});
  CHECK(zero.value == 0.0);
  Cond1Report no_lambda = cond1_value(w.grid, CubeCoefficients{}, w.ones,
                                      w.ones, w.e, w.root_family(), g);
  CHECK(no_lambda.value == 0.0);
}

TEST_CASE("first condition counts uncovered components") {
  Fixture w;
  CubeFamily family;
  family.cubes.insert(CubeId{1, 0});
  CubeVector g{{{CubeId{1, 1}, 1.0}, {CubeId{1, 0}, 1.0}}};
  Cond1Report report =
      cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e, family, g);
  CHECK(report.skipped_components == 1);
  CHECK(report.terms.size() == 1);
}

TEST_CASE("second testing condition at fixed weights") {
  Fixture w;
  CubeMap beta{{w.grid.root(), 1.0}};
  double value = cond2_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                             w.root_family(), beta);
  CHECK(value == doctest::Approx(kSeven6).epsilon(1e-13));

  CubeMap scaled{{w.grid.root(), 3.7}};
  CHECK(cond2_value(w.grid, w.lambda, w.ones, w.ones, w.e, w.root_family(),
                    scaled) == doctest::Approx(value).epsilon(1e-12));

  CHECK(cond2_value(w.grid, CubeCoefficients{}, w.ones, w.ones, w.e,
                    w.root_family(), beta) == 0.0);
}

TEST_CASE("localized test functions vanish off the lambda support") {
  Fixture w;
  CubeCoefficients lambda{{{CubeId{1, 1}, 1.0}}};
  CubeFamily family;
  family.cubes.insert(CubeId{1, 0});
  CubeMap beta{{CubeId{1, 0}, 1.0}};
  CHECK(cond2_value(w.grid, lambda, w.ones, w.ones, w.e, family, beta, true) ==
        0.0);
}

TEST_CASE("second condition constant reduces to a closed form for singletons") {
  Fixture w;
  ConditionReport report = cond2_constant(w.grid, w.lambda, w.ones, w.ones,
                                          w.e, w.root_family());
  CHECK(report.value == doctest::Approx(kSeven6).epsilon(1e-12));
  CHECK(report.method == Method::closed_form);

  ConditionReport zero = cond2_constant(w.grid, CubeCoefficients{}, w.ones,
                                        w.ones, w.e, w.root_family());
  CHECK(zero.value == 0.0);
}

TEST_CASE("second condition constant searches over weights") {
  Grid g(1, 1);
  LeafMeasure sigma(g, {1.0, 0.5});
  LeafMeasure mu(g, {0.25, 2.0});
  CubeCoefficients lambda{
      {{g.root(), 1.0}, {CubeId{1, 0}, 0.5}, {CubeId{1, 1}, 1.5}}};
  Exponents e = Exponents::make(3.0, 2.0, 2.0);
  CubeFamily family;
  family.cubes.insert(g.root());
  family.cubes.insert(CubeId{1, 0});
  family.cubes.insert(CubeId{1, 1});

  ConditionReport best = cond2_constant(g, lambda, sigma, mu, e, family);
  for (const auto& corner :
       {CubeMap{{g.root(), 1.0}}, CubeMap{{CubeId{1, 0}, 1.0}},
        CubeMap{{CubeId{1, 1}, 1.0}},
        CubeMap{{g.root(), 0.5}, {CubeId{1, 1}, 1.2}}}) {
    CHECK(best.value >=
          cond2_value(g, lambda, sigma, mu, e, family, corner) - 1e-9);
  }
  CHECK(cond2_value(g, lambda, sigma, mu, e, family, best.beta) ==
        doctest::Approx(best.value).epsilon(1e-8));
}

TEST_CASE("reduction condition value is allocation-free at s = q") {
  Fixture w;
  DisjointAllocation empty;
  DisjointAllocation full;
  full.sets[w.grid.root()] = full_cube_set<double>(w.grid, w.grid.root());

  double a = reduction_condition_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                       empty);
  double b = reduction_condition_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                       full);
  CHECK(a == b);
  CHECK(a == doctest::Approx(4.0 * std::cbrt(2.0)).epsilon(1e-13));

  CHECK(reduction_condition_value(w.grid, CubeCoefficients{}, w.ones, w.ones,
                                  w.e, full) == 0.0);

  Exponents wide = Exponents::make(3.0, 2.0, 4.0);
  CHECK(reduction_condition_value(w.grid, w.lambda, w.ones, w.ones, wide,
                                  empty) == 0.0);
}

TEST_CASE("reduction condition sup") {
  Fixture w;
  ConditionReport closed =
      reduction_condition_sup(w.grid, w.lambda, w.ones, w.ones, w.e);
  CHECK(closed.method == Method::closed_form);
  CHECK(closed.value ==
        s_eq_q_condition(w.grid, w.lambda, w.ones, w.ones, w.e.p, w.e.q));

  ConditionReport zero = reduction_condition_sup(
      w.grid, CubeCoefficients{}, w.ones, w.ones,
      Exponents::make(3.0, 2.0, 4.0));
  CHECK(zero.value == 0.0);

  CubeCoefficients two{{{w.grid.root(), 1.0}, {CubeId{1, 0}, 1.0}}};
  Exponents top = Exponents::make(3.0, 2.0, infinity);
  ConditionReport sup =
      reduction_condition_sup(w.grid, two, w.ones, w.ones, top);
  CHECK(sup.value == doctest::Approx(std::pow(2.0, 7.0 / 3.0)).epsilon(1e-9));
  validate_allocation(w.grid, sup.sets, 1e-9);
  CHECK(reduction_condition_value(w.grid, two, w.ones, w.ones, top, sup.sets) ==
        doctest::Approx(sup.value).epsilon(1e-6));
}

TEST_CASE("duality witness on a single cube") {
  Fixture w;
  DualityReport report =
      a1_a2_witness(w.grid, w.lambda, w.ones, 2.0);
  CHECK(report.a1 == 2.0);
  CHECK(report.alpha_star.at(w.grid.root()) == 2.0);
  CHECK(report.denominator == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(report.ratio == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(report.ratio >= report.a1 - 1e-9);

  DualityReport zero = a1_a2_witness(w.grid, CubeCoefficients{}, w.ones, 2.0);
  CHECK(zero.a1 == 0.0);
  CHECK(zero.ratio == 0.0);

  LeafMeasure null_right(w.grid, {1.0, 0.0});
  DualityReport off = a1_a2_witness(
      w.grid, CubeCoefficients{{{CubeId{1, 1}, 1.0}}}, null_right, 2.0);
  CHECK(off.a1 == 0.0);

  CHECK_THROWS_AS(a1_a2_witness(w.grid, w.lambda, w.ones, 1.0), Error);
  CHECK_THROWS_AS(a1_a2_witness(w.grid, w.lambda, w.ones, infinity), Error);
}

TEST_CASE("discrete allocation sums") {
  Fixture w;
  CubeCoefficients b{{{w.grid.root(), 1.0}}};
  DisjointAllocation half;
  half.sets[w.grid.root()].set(0, 0.5);

  CHECK(dorverbitsky_value(w.grid, b, w.ones, 2.0, 4.0, half) ==
        doctest::Approx(1.0).epsilon(1e-13));

  DisjointAllocation other;
  other.sets[w.grid.root()].set(1, 1.0);
  CHECK(dorverbitsky_value(w.grid, b, w.ones, 2.0, 2.0, other) ==
        dorverbitsky_value(w.grid, b, w.ones, 2.0, 2.0, half));

  CHECK(dorverbitsky_value(w.grid, CubeCoefficients{}, w.ones, 2.0, 4.0,
                           half) == 0.0);

  DisjointAllocation full;
  full.sets[w.grid.root()] = full_cube_set<double>(w.grid, w.grid.root());
  CHECK(dorverbitsky_value(w.grid, b, w.ones, 2.0, infinity, full) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("operator norm of a single cube matches the closed form") {
  Fixture w;
  ConditionReport report =
      operator_norm(w.grid, w.lambda, w.ones, w.ones, w.e);
  CHECK(report.value == doctest::Approx(kSeven6).epsilon(1e-8));
  CHECK(lp_norm(report.function, w.e.p, w.ones) ==
        doctest::Approx(1.0).epsilon(1e-8));

  CHECK(operator_norm(w.grid, CubeCoefficients{}, w.ones, w.ones, w.e).value ==
        0.0);
  LeafMeasure null_sigma(w.grid, {0.0, 0.0});
  CHECK_THROWS_AS(
      operator_norm(w.grid, w.lambda, null_sigma, w.ones, w.e), Error);
}

TEST_CASE("operator norm brute force") {
  Fixture w;
  double direct =
      operator_norm_bruteforce(w.grid, w.lambda, w.ones, w.ones, w.e);
  CHECK(direct == doctest::Approx(kSeven6).epsilon(0.01));

  Grid unit(1, 0);
  LeafMeasure sigma(unit, {2.0});
  LeafMeasure mu(unit, {5.0});
  CubeCoefficients lambda{{{unit.root(), 3.0}}};
  double flat = operator_norm_bruteforce(unit, lambda, sigma, mu,
                                         Exponents::make(3.0, 2.0, 2.0));
  CHECK(flat == doctest::Approx(3.0 * std::pow(2.0, 2.0 / 3.0) *
                                std::sqrt(5.0))
                    .epsilon(1e-12));

  Grid wide(1, 7);
  LeafMeasure fat(wide, std::vector<double>(128, 1.0));
  try {
    operator_norm_bruteforce(wide, CubeCoefficients{{{wide.root(), 1.0}}},
                             fat, fat, w.e);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_large);
  }
}

TEST_CASE("ascent beats fixed test functions") {
  Grid g(1, 2);
  LeafMeasure sigma(g, {1.0, 0.5, 2.0, 0.25});
  LeafMeasure mu(g, {0.5, 1.0, 1.0, 2.0});
  CubeCoefficients lambda{
      {{g.root(), 0.7}, {CubeId{1, 1}, 1.3}, {CubeId{2, 0}, 0.4}}};
  Exponents e = Exponents::make(3.0, 1.5, 3.0);

  ConditionReport best = operator_norm(g, lambda, sigma, mu, e);
  for (auto f : {LeafFunction(g, 1.0), LeafFunction({1, 0, 0, 0}),
                 LeafFunction({0, 1, 2, 0.5})}) {
    double value = mixed_norm(g, apply_T(g, lambda, sigma, f), e, mu) /
                   lp_norm(f, e.p, sigma);
    CHECK(best.value >= value - 1e-8);
  }
  double oracle = operator_norm_bruteforce(g, lambda, sigma, mu, e);
  CHECK(best.value == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("weak-type first condition restricted to the full space") {
  Fixture w;
  CubeVector g{{{w.grid.root(), 1.0}}};
  FractionalSet full = full_cube_set<double>(w.grid, w.grid.root());
  Cond1Report report = weak_cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                        1.5, full, w.root_family(), g);
  CHECK(report.value == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(weak_cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e, 2.5,
                                   full, w.root_family(), g),
                  Error);
  CHECK_THROWS_AS(weak_cond1_value(w.grid, w.lambda, w.ones, w.ones, w.e, 1.5,
                                   FractionalSet{}, w.root_family(), g),
                  Error);
}

TEST_CASE("weak-type second condition has two readings") {
  Fixture w;
  CubeMap beta{{w.grid.root(), 1.0}};
  FractionalSet full = full_cube_set<double>(w.grid, w.grid.root());

  double printed = weak_cond2_value(w.grid, w.lambda, w.ones, w.ones, w.e, 1.5,
                                    full, w.root_family(), beta);
  CHECK(printed == doctest::Approx(2.0).epsilon(1e-12));

  double alternate = weak_cond2_value(w.grid, w.lambda, w.ones, w.ones, w.e,
                                      1.5, full, w.root_family(), beta, true);
  CHECK(alternate == doctest::Approx(kSeven6).epsilon(1e-12));

  double scaled = weak_cond2_value(w.grid, w.lambda, w.ones, w.ones, w.e, 1.5,
                                   full, w.root_family(),
                                   CubeMap{{w.grid.root(), 2.5}});
  CHECK(scaled == doctest::Approx(printed).epsilon(1e-12));
}
