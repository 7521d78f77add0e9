#include <doctest.h>

#include <cmath>

#include "dyadic/operator.hpp"

using namespace dyadic;

namespace {

struct Pair {
  Grid grid{1, 1};
  LeafMeasure ones{grid, {1.0, 1.0}};
};

}  // namespace

TEST_CASE("apply_T produces one component per coefficient") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CubeVector out = apply_T(w.grid, lambda, w.ones, LeafFunction(w.grid, 1.0));
  REQUIRE(out.values.size() == 1);
  CHECK(out.at(w.grid.root()) == 2.0);

  CHECK(apply_T(w.grid, CubeCoefficients{}, w.ones, LeafFunction(w.grid, 1.0))
            .values.empty());
  out = apply_T(w.grid, lambda, w.ones, LeafFunction(w.grid, 0.0));
  CHECK(out.at(w.grid.root()) == 0.0);

  CHECK_THROWS_AS(
      apply_T(w.grid, lambda, w.ones, LeafFunction({1.0, -1.0})), Error);
  CubeVector signed_out =
      apply_T(w.grid, lambda, w.ones, LeafFunction({1.0, -1.0}), true);
  CHECK(signed_out.at(w.grid.root()) == 0.0);
}

TEST_CASE("apply_T_local keeps only components inside P") {
  Grid g(1, 2);
  LeafMeasure sigma(g, {1.0, 1.0, 1.0, 1.0});
  CubeId l0{1, 0};
  CubeCoefficients lambda{{{g.root(), 1.0}, {l0, 1.0}}};
  LeafFunction f(g, 1.0);

  CubeVector local = apply_T_local(g, lambda, sigma, f, l0);
  REQUIRE(local.values.size() == 1);
  CHECK(local.at(l0) == 2.0);

  CubeVector all = apply_T_local(g, lambda, sigma, f, g.root());
  CHECK(all.values == apply_T(g, lambda, sigma, f).values);

  CHECK(apply_T_local(g, CubeCoefficients{{{g.root(), 1.0}}}, sigma, f,
                      g.leaf_cube(0))
            .values.empty());
}

TEST_CASE("apply_T_star sums lambda g mu over the ancestor chain") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CubeVector g{{{w.grid.root(), 1.0}}};
  LeafFunction out = apply_T_star(w.grid, lambda, w.ones, g);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 2.0);

  LeafFunction zero = apply_T_star(w.grid, lambda, w.ones, CubeVector{});
  CHECK(zero[0] == 0.0);
  LeafFunction no_lambda =
      apply_T_star(w.grid, CubeCoefficients{}, w.ones, g);
  CHECK(no_lambda[0] == 0.0);
}

TEST_CASE("adjoint identity on a hand instance") {
  Grid g(1, 2);
  LeafMeasure sigma(g, {1.0, 0.5, 2.0, 0.25});
  LeafMeasure mu(g, {0.5, 1.0, 1.0, 2.0});
  CubeCoefficients lambda{
      {{g.root(), 0.7}, {CubeId{1, 1}, 1.3}, {CubeId{2, 0}, 0.4}}};
  LeafFunction f({1.0, 2.0, 0.5, 1.5});
  CubeVector v{{{g.root(), -1.0}, {CubeId{1, 1}, 2.0}, {CubeId{2, 0}, 0.5}}};

  double lhs = 0.0;
  CubeVector tf = apply_T(g, lambda, sigma, f);
  for (const auto& [cube, value] : tf.values)
    lhs += value * v.at(cube) * mu.cube_mass(cube);
  double rhs = integrate(LeafFunction([&] {
                           LeafFunction h = apply_T_star(g, lambda, mu, v);
                           std::vector<double> prod(h.size());
                           for (std::uint64_t leaf = 0; leaf < h.size(); ++leaf)
                             prod[leaf] = h[leaf] * f[leaf];
                           return prod;
                         }()),
                         sigma);
  CHECK(pairing(g, lambda, sigma, mu, f, v, true) ==
        doctest::Approx(lhs).epsilon(1e-13));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("ls_aggregate handles finite s and the sup") {
  Pair w;
  CubeVector v{{{w.grid.root(), 3.0}, {CubeId{1, 0}, -4.0}}};
  LeafFunction two = ls_aggregate(w.grid, v, 2.0);
  CHECK(two[0] == 5.0);
  CHECK(two[1] == 3.0);
  LeafFunction sup = ls_aggregate(w.grid, v, infinity);
  CHECK(sup[0] == 4.0);
  CHECK(sup[1] == 3.0);
  LeafFunction one = ls_aggregate(w.grid, v, 1.0);
  CHECK(one[0] == 7.0);
}

TEST_CASE("mixed norm of a single-cube vector") {
  Pair w;
  CubeVector v{{{w.grid.root(), 2.0}}};
  CHECK(mixed_norm(w.grid, v, 2.0, 2.0, w.ones) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));

  CubeVector leaf{{{w.grid.leaf_cube(0), 1.0}}};
  for (double s : {1.0, 2.0, infinity})
    for (double q : {1.0, 1.5, 2.0})
      CHECK(mixed_norm(w.grid, leaf, s, q, w.ones) ==
            doctest::Approx(1.0).epsilon(1e-14));

  CHECK(mixed_norm(w.grid, CubeVector{}, 2.0, 2.0, w.ones) == 0.0);
}

TEST_CASE("weak norm takes the sup of t^q times the tail mass") {
  Pair w;
  CHECK(weak_norm(LeafFunction({2.0, 1.0}), 2.0, w.ones) == 4.0);
  CHECK(weak_norm(LeafFunction(w.grid, 0.0), 2.0, w.ones) == 0.0);
  CHECK(weak_norm(LeafFunction(w.grid, 3.0), 2.0, w.ones) == 9.0 * 2.0);
  CHECK(weak_norm(LeafFunction({-2.0, 1.0}), 1.0, w.ones) == 2.0);
  CHECK(weak_norm(LeafFunction({5.0, 5.0}), 2.0, w.ones) == 50.0);
}

TEST_CASE("kolmogorov value") {
  Pair w;
  FractionalSet full = full_cube_set<double>(w.grid, w.grid.root());

  Grid unit(1, 0);
  LeafMeasure one(unit, {1.0});
  FractionalSet whole = full_cube_set<double>(unit, unit.root());
  CHECK(kolmogorov_value(LeafFunction(unit, 1.0), 2.0, 1.0, one, whole) == 1.0);
  CHECK(kolmogorov_value(LeafFunction(unit, 1.0), 3.0, 1.5, one, whole) ==
        doctest::Approx(1.0).epsilon(1e-14));

  CHECK(kolmogorov_value(LeafFunction({2.0, 1.0}), 2.0, 1.0, w.ones, full) ==
        doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(
      kolmogorov_value(LeafFunction({2.0, 1.0}), 2.0, 1.0, w.ones,
                       FractionalSet{}),
      Error);
  CHECK_THROWS_AS(
      kolmogorov_value(LeafFunction({2.0, 1.0}), 2.0, 2.5, w.ones, full),
      Error);
}

TEST_CASE("linf ls norm") {
  Pair w;
  Exponents e = Exponents::make(3.0, 2.0, 2.0);
  CubeVector g{{{w.grid.root(), 1.0}}};
  CHECK(linf_ls_norm(w.grid, g, e, w.ones) == 1.0);

  CubeVector two{{{w.grid.root(), 1.0}, {CubeId{1, 0}, 1.0}}};
  CHECK(linf_ls_norm(w.grid, two, e, w.ones) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  Exponents inf_e = Exponents::make(3.0, 2.0, infinity);
  CHECK(linf_ls_norm(w.grid, two, inf_e, w.ones) == 2.0);

  LeafMeasure skew(w.grid, {0.0, 1.0});
  CubeVector leafy{{{w.grid.leaf_cube(0), 7.0}, {w.grid.leaf_cube(1), 1.0}}};
  Exponents e1 = Exponents::make(3.0, 2.0, infinity);
  CHECK(linf_ls_norm(w.grid, leafy, e1, skew) == 1.0);
}

TEST_CASE("pairing matches the hand sum") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CubeVector g{{{w.grid.root(), 1.0}}};
  CHECK(pairing(w.grid, lambda, w.ones, w.ones, LeafFunction(w.grid, 1.0), g) ==
        4.0);
  CHECK(pairing(w.grid, lambda, w.ones, w.ones, LeafFunction(w.grid, 0.0), g) ==
        0.0);
  CHECK(pairing(w.grid, CubeCoefficients{}, w.ones, w.ones,
                LeafFunction(w.grid, 1.0), g) == 0.0);
}

TEST_CASE("maximal multiplier is the chain sup") {
  Pair w;
  CubeCoefficients rho{{{w.grid.root(), 1.0}, {CubeId{1, 0}, 2.0}}};
  LeafFunction m = maximal_multiplier(w.grid, rho);
  CHECK(m[0] == 2.0);
  CHECK(m[1] == 1.0);
  LeafFunction empty = maximal_multiplier(w.grid, CubeCoefficients{});
  CHECK(empty[0] == 0.0);
  CubeCoefficients leafy{{{w.grid.leaf_cube(1), 3.0}}};
  LeafFunction right = maximal_multiplier(w.grid, leafy);
  CHECK(right[0] == 0.0);
  CHECK(right[1] == 3.0);
}

TEST_CASE("multiplier lhs matches the mixed norm example") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CubeCoefficients rho{{{w.grid.root(), 1.0}}};
  Exponents e = Exponents::make(3.0, 2.0, 2.0);
  CHECK(multiplier_lhs(w.grid, lambda, w.ones, rho, e, w.ones) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(multiplier_lhs(w.grid, lambda, w.ones, CubeCoefficients{}, e, w.ones) ==
        0.0);
  CHECK(multiplier_lhs(w.grid, CubeCoefficients{}, w.ones, rho, e, w.ones) ==
        0.0);
}

TEST_CASE("reduction to the linear operator") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CubeCoefficients same = reduce_to_linear(w.grid, lambda, w.ones, 1.0);
  CHECK(same.values == lambda.values);
  CubeCoefficients squared = reduce_to_linear(w.grid, lambda, w.ones, 2.0);
  CHECK(squared.at(w.grid.root()) == 2.0);
  CHECK(reduce_to_linear(w.grid, CubeCoefficients{}, w.ones, 2.0).values.empty());
}

TEST_CASE("s equals q condition closed form") {
  Pair w;
  CubeCoefficients lambda{{{w.grid.root(), 1.0}}};
  CHECK(s_eq_q_condition(w.grid, lambda, w.ones, w.ones, 3.0, 2.0) ==
        doctest::Approx(4.0 * std::cbrt(2.0)).epsilon(1e-14));
  CHECK(s_eq_q_condition(w.grid, CubeCoefficients{}, w.ones, w.ones, 3.0, 2.0) ==
        0.0);

  LeafMeasure left(w.grid, {1.0, 0.0});
  CubeCoefficients disjoint{{{w.grid.leaf_cube(1), 1.0}}};
  CHECK(s_eq_q_condition(w.grid, disjoint, left, w.ones, 3.0, 2.0) == 0.0);
}

TEST_CASE("coercion zeroes coefficients on sigma-null cubes") {
  Pair w;
  LeafMeasure left(w.grid, {1.0, 0.0});
  CubeCoefficients lambda{
      {{w.grid.root(), 1.0}, {w.grid.leaf_cube(1), 2.0}}};
  int dropped = coerce_coefficients(w.grid, lambda, left);
  CHECK(dropped == 1);
  CHECK(lambda.at(w.grid.leaf_cube(1)) == 0.0);
  CHECK(lambda.at(w.grid.root()) == 1.0);
}
