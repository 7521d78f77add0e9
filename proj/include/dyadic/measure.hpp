#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/rational.hpp"

namespace dyadic {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// A measurable subset of the unit cube described by the fraction of each
// leaf it occupies. Fractions lie in [0,1]; leaves absent from the map are
// not in the set. This is how divisibility of the underlying space enters:
// any sub-mass of a leaf can be carved off, there are no atoms.
template <class S>
struct BasicFractionalSet {
  std::map<std::uint64_t, S> fractions;

  S fraction(std::uint64_t leaf) const {
    auto it = fractions.find(leaf);
    return it == fractions.end() ? S{} : it->second;
  }

  void set(std::uint64_t leaf, S value) {
    if (value == S{})
      fractions.erase(leaf);
    else
      fractions[leaf] = std::move(value);
  }

  bool empty() const { return fractions.empty(); }
};

using FractionalSet = BasicFractionalSet<double>;

template <class S>
void validate_fractional_set(const Grid& g, const BasicFractionalSet<S>& set) {
  for (const auto& [leaf, fr] : set.fractions) {
    require(leaf < g.leaf_count(), Errc::invalid_input,
            "fractional set references a leaf outside the grid");
    require(fr >= S{} && fr <= S{1}, Errc::invalid_input,
            "leaf fractions must lie in [0,1]");
  }
}

template <class S>
BasicFractionalSet<S> full_cube_set(const Grid& g, CubeId q) {
  BasicFractionalSet<S> set;
  const LeafRange range = g.leaves_under(q);
  for (std::uint64_t leaf = range.first; leaf < range.last; ++leaf)
    set.fractions.emplace(leaf, S{1});
  return set;
}

// A nonnegative measure given by one divisible mass per leaf. Cube masses
// are aggregated bottom-up once at construction.
template <class S>
class BasicLeafMeasure {
public:
  BasicLeafMeasure() = default;

  BasicLeafMeasure(Grid grid, std::vector<S> leaf_masses, std::string name = {})
      : grid_(grid), name_(std::move(name)), leaf_(std::move(leaf_masses)) {
    require(leaf_.size() == grid_.leaf_count(), Errc::invalid_input,
            "measure needs exactly one mass per leaf");
    for (const S& m : leaf_)
      require(m >= S{}, Errc::invalid_input, "leaf masses must be nonnegative");
    cube_ = subtree_sums(grid_, leaf_);
  }

  const Grid& grid() const { return grid_; }
  const std::string& name() const { return name_; }
  const std::vector<S>& leaf_masses() const { return leaf_; }

  const S& leaf_mass(std::uint64_t leaf) const { return leaf_.at(leaf); }
  const S& cube_mass(CubeId q) const { return cube_[grid_.cube_key(q)]; }
  const S& total() const { return cube_[0]; }

  S set_mass(const BasicFractionalSet<S>& set) const {
    S total{};
    for (const auto& [leaf, fr] : set.fractions) {
      require(leaf < grid_.leaf_count(), Errc::invalid_input,
              "fractional set references a leaf outside the grid");
      total += fr * leaf_[leaf];
    }
    return total;
  }

private:
  Grid grid_;
  std::string name_;
  std::vector<S> leaf_;
  std::vector<S> cube_;
};

using LeafMeasure = BasicLeafMeasure<double>;
using RationalLeafMeasure = BasicLeafMeasure<Rational>;

// Pairwise disjoint measurable pieces E_Q indexed by cubes. Disjointness
// means the per-leaf fractions over all pieces sum to at most 1.
template <class S>
struct BasicDisjointAllocation {
  std::map<CubeId, BasicFractionalSet<S>> sets;
};

using DisjointAllocation = BasicDisjointAllocation<double>;

// Checks fractions are valid, each piece sits inside its cube, and the
// pieces are disjoint up to `slack` per leaf (use slack 0 for exact scalars).
template <class S>
void validate_allocation(const Grid& g, const BasicDisjointAllocation<S>& alloc,
                         double slack = 0.0) {
  std::map<std::uint64_t, S> totals;
  for (const auto& [cube, set] : alloc.sets) {
    g.check(cube);
    validate_fractional_set(g, set);
    const LeafRange range = g.leaves_under(cube);
    for (const auto& [leaf, fr] : set.fractions) {
      require(range.contains(leaf), Errc::invalid_input,
              "allocated set leaks outside its cube");
      totals[leaf] += fr;
    }
  }
  for (const auto& [leaf, total] : totals) {
    bool ok;
    if constexpr (std::is_same_v<S, double>)
      ok = total <= 1.0 + slack;
    else
      ok = total <= S{1};
    require(ok, Errc::overlapping_allocation,
            "allocated sets overlap: leaf " + std::to_string(leaf) +
                " is covered more than once");
  }
}

// A function on the unit cube, constant on each leaf.
struct LeafFunction {
  std::vector<double> values;

  LeafFunction() = default;
  explicit LeafFunction(std::vector<double> v) : values(std::move(v)) {}
  LeafFunction(const Grid& g, double constant)
      : values(g.leaf_count(), constant) {}

  double operator[](std::uint64_t leaf) const { return values[leaf]; }
  std::size_t size() const { return values.size(); }
};

void check_function(const Grid& g, const LeafFunction& f);
void check_nonnegative(const LeafFunction& f);

double integrate(const LeafFunction& f, const LeafMeasure& m, CubeId q);
double integrate(const LeafFunction& f, const LeafMeasure& m);

// Throws zero_mass_cube when m(q) = 0.
double average(const LeafFunction& f, const LeafMeasure& m, CubeId q);

// p in [1, infinity]; p = infinity is the essential sup (leaves of zero
// mass are ignored).
double lp_norm(const LeafFunction& f, double p, const LeafMeasure& m);

// The measure 1_E dm.
LeafMeasure restrict_measure(const LeafMeasure& m, const FractionalSet& set);

}  // namespace dyadic
