#include "dyadic/wolff.hpp"

#include <cmath>

namespace dyadic {

void validate_wolff_params(const Grid& g, const WolffParams& w) {
  require(0.0 < w.alpha && w.alpha < static_cast<double>(g.dimension()),
          Errc::invalid_input, "the fractional order must lie in (0, n)");
  require(w.s > 0.0 && std::isfinite(w.s), Errc::invalid_input,
          "the aggregation power must be positive and finite");
}

LeafMeasure lebesgue_measure(const Grid& g) {
  return LeafMeasure(
      g, std::vector<double>(g.leaf_count(), 1.0 / double(g.leaf_count())),
      "lebesgue");
}

namespace {

// Per-cube terms (integral_Q f dx / |Q|^{1 - alpha/n})^s over a set of cubes.
CubeMap wolff_terms(const Grid& g, const LeafFunction& f, const WolffParams& w,
                    const CubeFamily* family) {
  check_function(g, f);
  check_nonnegative(f);
  validate_wolff_params(g, w);
  const LeafMeasure lebesgue = lebesgue_measure(g);
  std::vector<double> weighted(g.leaf_count());
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    weighted[leaf] = f[leaf] * lebesgue.leaf_mass(leaf);
  const std::vector<double> integral = subtree_sums(g, weighted);

  const double n = g.dimension();
  CubeMap terms;
  // log2 |Q| = -level * n exactly, so the term is computed as
  // exp2(s * (log2 integral + level * (n - alpha))); this keeps dyadic
  // inputs exact all the way through.
  auto term_at = [&](CubeId q) {
    const double mass = integral[g.cube_key(q)];
    if (mass <= 0.0) return;
    terms.emplace(
        q, std::exp2(w.s * (std::log2(mass) + q.level * (n - w.alpha))));
  };
  if (family) {
    validate_family(g, *family);
    for (CubeId q : family->cubes) term_at(q);
  } else {
    for (CubeId q : g.all_cubes()) term_at(q);
  }
  return terms;
}

}  // namespace

LeafFunction wolff_dyadic(const Grid& g, const LeafFunction& f,
                          const WolffParams& w) {
  return LeafFunction(ancestor_sums(g, wolff_terms(g, f, w, nullptr)));
}

LeafFunction wolff_sparse(const Grid& g, const LeafFunction& f,
                          const WolffParams& w, const CubeFamily& family) {
  return LeafFunction(ancestor_sums(g, wolff_terms(g, f, w, &family)));
}

WolffFamilyReport wolff_sparse_family(const Grid& g, const LeafFunction& f,
                                      const WolffParams& w, double threshold) {
  check_function(g, f);
  check_nonnegative(f);
  validate_wolff_params(g, w);
  bool vanishes = true;
  for (double v : f.values)
    if (v != 0.0) vanishes = false;
  require(!vanishes, Errc::zero_function,
          "the stopping family needs a function that is not identically 0");

  WolffFamilyReport report;
  report.family = stopping_family(g, f, lebesgue_measure(g), threshold);
  const LeafFunction full = wolff_dyadic(g, f, w);
  const LeafFunction sparse = wolff_sparse(g, f, w, report.family);
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
    if (full[leaf] == 0.0) continue;
    report.domination_ratio =
        std::max(report.domination_ratio, full[leaf] / sparse[leaf]);
  }
  return report;
}

double wolff_condition_value(const Grid& g, const LeafMeasure& sigma,
                             const LeafMeasure& mu, const Exponents& e,
                             const WolffParams& w, const CubeFamily& family) {
  validate_wolff_params(g, w);
  validate_family(g, family);
  const double n = g.dimension();
  CubeMap contributions;
  for (CubeId q : family.cubes) {
    const double mass = sigma.cube_mass(q);
    if (mass == 0.0) continue;
    const double coeff = std::pow(g.volume(q), w.alpha / n - 1.0) * mass;
    const double value = std::pow(coeff, e.q) * mu.cube_mass(q) / mass;
    if (value > 0.0) contributions[q] += value;
  }
  return lp_norm(LeafFunction(ancestor_sums(g, contributions)),
                 e.p_tilde_conj, sigma);
}

}  // namespace dyadic
