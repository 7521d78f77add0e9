#include "dyadic/operator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dyadic {

void validate_coefficients(const Grid& g, const CubeCoefficients& lambda) {
  for (const auto& [cube, value] : lambda.values) {
    g.check(cube);
    require(std::isfinite(value) && value >= 0.0, Errc::invalid_input,
            "coefficients must be finite and nonnegative");
  }
}

void validate_cube_vector(const Grid& g, const CubeVector& v) {
  for (const auto& [cube, value] : v.values) {
    g.check(cube);
    require(std::isfinite(value), Errc::invalid_input,
            "cube vector entries must be finite");
  }
}

int coerce_coefficients(const Grid& g, CubeCoefficients& lambda,
                        const LeafMeasure& sigma) {
  validate_coefficients(g, lambda);
  int dropped = 0;
  for (auto it = lambda.values.begin(); it != lambda.values.end();) {
    if (it->second > 0.0 && sigma.cube_mass(it->first) == 0.0) {
      it = lambda.values.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

namespace {

// Integral of f against m over every cube, indexed by cube key.
std::vector<double> cube_integrals(const Grid& g, const LeafFunction& f,
                                   const LeafMeasure& m) {
  check_function(g, f);
  std::vector<double> weighted(g.leaf_count());
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    weighted[leaf] = f[leaf] * m.leaf_mass(leaf);
  return subtree_sums(g, weighted);
}

}  // namespace

CubeVector apply_T(const Grid& g, const CubeCoefficients& lambda,
                   const LeafMeasure& sigma, const LeafFunction& f,
                   bool allow_signed) {
  validate_coefficients(g, lambda);
  if (!allow_signed) check_nonnegative(f);
  const std::vector<double> integral = cube_integrals(g, f, sigma);
  CubeVector out;
  for (const auto& [cube, value] : lambda.values)
    out.values.emplace(cube, value * integral[g.cube_key(cube)]);
  return out;
}

CubeVector apply_T_local(const Grid& g, const CubeCoefficients& lambda,
                         const LeafMeasure& sigma, const LeafFunction& f,
                         CubeId P, bool allow_signed) {
  g.check(P);
  CubeVector all = apply_T(g, lambda, sigma, f, allow_signed);
  CubeVector out;
  for (const auto& [cube, value] : all.values)
    if (g.contains(P, cube)) out.values.emplace(cube, value);
  return out;
}

LeafFunction apply_T_star(const Grid& g, const CubeCoefficients& lambda,
                          const LeafMeasure& mu, const CubeVector& v) {
  validate_coefficients(g, lambda);
  validate_cube_vector(g, v);
  CubeMap contributions;
  for (const auto& [cube, value] : v.values) {
    const double coeff = lambda.at(cube);
    if (coeff == 0.0) continue;
    contributions.emplace(cube, coeff * value * mu.cube_mass(cube));
  }
  return LeafFunction(ancestor_sums(g, contributions));
}

LeafFunction ls_aggregate(const Grid& g, const CubeVector& v, double s) {
  validate_cube_vector(g, v);
  require(s >= 1.0, Errc::invalid_input, "ls_aggregate requires s >= 1");
  CubeMap powered;
  if (s == infinity) {
    for (const auto& [cube, value] : v.values)
      powered.emplace(cube, std::abs(value));
    return LeafFunction(ancestor_max(g, powered));
  }
  for (const auto& [cube, value] : v.values)
    powered.emplace(cube, std::pow(std::abs(value), s));
  std::vector<double> sums = ancestor_sums(g, powered);
  for (double& x : sums) x = std::pow(x, 1.0 / s);
  return LeafFunction(std::move(sums));
}

double mixed_norm(const Grid& g, const CubeVector& v, double s, double q,
                  const LeafMeasure& mu) {
  require(q >= 1.0, Errc::invalid_input, "mixed_norm requires q >= 1");
  return lp_norm(ls_aggregate(g, v, s), q, mu);
}

double mixed_norm(const Grid& g, const CubeVector& v, const Exponents& e,
                  const LeafMeasure& mu) {
  return mixed_norm(g, v, e.s, e.q, mu);
}

double weak_norm(const LeafFunction& h, double q, const LeafMeasure& mu) {
  check_function(mu.grid(), h);
  require(q > 0.0, Errc::invalid_input, "weak_norm requires q > 0");
  std::vector<std::pair<double, double>> entries;  // (|h|, mass)
  entries.reserve(h.size());
  for (std::uint64_t leaf = 0; leaf < h.size(); ++leaf)
    entries.emplace_back(std::abs(h[leaf]), mu.leaf_mass(leaf));
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    mass += entries[i].second;
    if (entries[i].first == 0.0) break;
    if (i + 1 < entries.size() && entries[i + 1].first == entries[i].first)
      continue;  // the level set mu(|h| >= t) includes all ties
    best = std::max(best, std::pow(entries[i].first, q) * mass);
  }
  return best;
}

double kolmogorov_value(const LeafFunction& h, double q, double alpha,
                        const LeafMeasure& mu, const FractionalSet& set) {
  check_function(mu.grid(), h);
  validate_fractional_set(mu.grid(), set);
  require(0.0 < alpha && alpha < q, Errc::invalid_input,
          "kolmogorov_value requires 0 < alpha < q");
  const LeafMeasure restricted = restrict_measure(mu, set);
  const double mass = restricted.total();
  require(mass > 0.0, Errc::empty_set,
          "kolmogorov_value over a set of zero mass");
  double integral = 0.0;
  for (std::uint64_t leaf = 0; leaf < h.size(); ++leaf)
    integral += std::pow(std::abs(h[leaf]), alpha) * restricted.leaf_mass(leaf);
  return std::pow(mass, (alpha - q) / (alpha * q)) *
         std::pow(integral, 1.0 / alpha);
}

double linf_ls_norm(const Grid& g, const CubeVector& v, const Exponents& e,
                    const LeafMeasure& mu) {
  return lp_norm(ls_aggregate(g, v, e.s_conj), infinity, mu);
}

double pairing(const Grid& g, const CubeCoefficients& lambda,
               const LeafMeasure& sigma, const LeafMeasure& mu,
               const LeafFunction& f, const CubeVector& v, bool allow_signed) {
  validate_coefficients(g, lambda);
  validate_cube_vector(g, v);
  if (!allow_signed) check_nonnegative(f);
  const std::vector<double> integral = cube_integrals(g, f, sigma);
  double total = 0.0;
  for (const auto& [cube, value] : v.values) {
    const double coeff = lambda.at(cube);
    if (coeff == 0.0) continue;
    total += coeff * integral[g.cube_key(cube)] * value * mu.cube_mass(cube);
  }
  return total;
}

LeafFunction maximal_multiplier(const Grid& g, const CubeCoefficients& rho) {
  validate_coefficients(g, rho);
  return LeafFunction(ancestor_max(g, rho.values));
}

double multiplier_lhs(const Grid& g, const CubeCoefficients& lambda,
                      const LeafMeasure& sigma, const CubeCoefficients& rho,
                      const Exponents& e, const LeafMeasure& mu) {
  validate_coefficients(g, lambda);
  validate_coefficients(g, rho);
  CubeVector weighted;
  for (const auto& [cube, r] : rho.values) {
    const double coeff = lambda.at(cube);
    if (coeff == 0.0 || r == 0.0) continue;
    weighted.values.emplace(cube, r * coeff * sigma.cube_mass(cube));
  }
  return mixed_norm(g, weighted, e, mu);
}

CubeCoefficients reduce_to_linear(const Grid& g, const CubeCoefficients& lambda,
                                  const LeafMeasure& sigma, double s) {
  validate_coefficients(g, lambda);
  require(s >= 1.0 && s != infinity, Errc::invalid_input,
          "reduce_to_linear requires finite s >= 1");
  CubeCoefficients out;
  for (const auto& [cube, value] : lambda.values) {
    const double mass = sigma.cube_mass(cube);
    if (mass == 0.0) {
      out.values.emplace(cube, 0.0);
      continue;
    }
    out.values.emplace(cube, std::pow(value, s) * std::pow(mass, s - 1.0));
  }
  return out;
}

double s_eq_q_condition(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        double p, double q) {
  validate_coefficients(g, lambda);
  require(1.0 < q && q < p && std::isfinite(p), Errc::invalid_input,
          "s_eq_q_condition requires 1 < q < p < infinity");
  CubeMap contributions;
  for (const auto& [cube, value] : lambda.values) {
    const double sq = sigma.cube_mass(cube);
    if (value == 0.0 || sq == 0.0) continue;
    contributions.emplace(cube, std::pow(value, q) * std::pow(sq, q - 1.0) *
                                    mu.cube_mass(cube));
  }
  const LeafFunction density(ancestor_sums(g, contributions));
  return lp_norm(density, conjugate(p / q), sigma);
}

}  // namespace dyadic
