#include "dyadic/measure.hpp"

#include <algorithm>
#include <cmath>

namespace dyadic {

void check_function(const Grid& g, const LeafFunction& f) {
  require(f.size() == g.leaf_count(), Errc::invalid_input,
          "leaf function length does not match the grid");
  for (double v : f.values)
    require(std::isfinite(v), Errc::invalid_input,
            "leaf function values must be finite");
}

void check_nonnegative(const LeafFunction& f) {
  for (double v : f.values)
    require(v >= 0.0, Errc::invalid_input,
            "expected a nonnegative leaf function");
}

double integrate(const LeafFunction& f, const LeafMeasure& m, CubeId q) {
  check_function(m.grid(), f);
  const LeafRange range = m.grid().leaves_under(q);
  double total = 0.0;
  for (std::uint64_t leaf = range.first; leaf < range.last; ++leaf)
    total += f[leaf] * m.leaf_mass(leaf);
  return total;
}

double integrate(const LeafFunction& f, const LeafMeasure& m) {
  return integrate(f, m, m.grid().root());
}

double average(const LeafFunction& f, const LeafMeasure& m, CubeId q) {
  const double mass = m.cube_mass(q);
  require(mass > 0.0, Errc::zero_mass_cube,
          "average over a cube of zero mass");
  return integrate(f, m, q) / mass;
}

double lp_norm(const LeafFunction& f, double p, const LeafMeasure& m) {
  check_function(m.grid(), f);
  require(p >= 1.0, Errc::invalid_input, "lp_norm requires p >= 1");
  if (p == infinity) {
    double sup = 0.0;
    for (std::uint64_t leaf = 0; leaf < m.grid().leaf_count(); ++leaf)
      if (m.leaf_mass(leaf) > 0.0) sup = std::max(sup, std::abs(f[leaf]));
    return sup;
  }
  double total = 0.0;
  for (std::uint64_t leaf = 0; leaf < m.grid().leaf_count(); ++leaf)
    total += std::pow(std::abs(f[leaf]), p) * m.leaf_mass(leaf);
  return std::pow(total, 1.0 / p);
}

LeafMeasure restrict_measure(const LeafMeasure& m, const FractionalSet& set) {
  validate_fractional_set(m.grid(), set);
  std::vector<double> masses(m.grid().leaf_count(), 0.0);
  for (const auto& [leaf, fr] : set.fractions)
    masses[leaf] = fr * m.leaf_mass(leaf);
  return LeafMeasure(m.grid(), std::move(masses), m.name());
}

}  // namespace dyadic
