#include "dyadic/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

namespace dyadic {

void validate_family(const Grid& g, const CubeFamily& family) {
  for (CubeId q : family.cubes) g.check(q);
}

namespace {

// Deep cubes first, canonical order inside each level.
template <class S>
std::vector<std::pair<CubeId, S>> bottom_up(const BasicCubeMap<S>& values) {
  std::vector<std::pair<CubeId, S>> out(values.begin(), values.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.level != b.first.level) return a.first.level > b.first.level;
    return a.first.pos < b.first.pos;
  });
  return out;
}

template <class S>
double select_slack(const S& t) {
  if constexpr (std::is_same_v<S, double>)
    return 1e-12 * std::max(1.0, std::abs(t));
  else
    return 0.0;
}

}  // namespace

template <class S>
BasicCarlesonReport<S> carleson_constant(const Grid& g,
                                         const BasicCubeMap<S>& lambda,
                                         const BasicLeafMeasure<S>& m) {
  for (const auto& [cube, v] : lambda) {
    g.check(cube);
    require(v >= S{}, Errc::invalid_input, "coefficients must be nonnegative");
  }
  const std::vector<S> load = cube_tree_sums(g, lambda);
  BasicCarlesonReport<S> report;
  bool have_best = false;
  for (int level = 0; level <= g.depth(); ++level) {
    for (std::uint64_t pos = 0; pos < g.level_size(level); ++pos) {
      const CubeId cube{level, pos};
      const S& total = load[g.cube_key(cube)];
      const S& mass = m.cube_mass(cube);
      if (mass > S{}) {
        S ratio = total / mass;
        report.ratios.emplace_back(cube, ratio);
        if (!have_best || ratio > report.value) {
          have_best = true;
          report.value = ratio;
          report.witness = cube;
        }
      } else if (total > S{} && !report.infinite) {
        report.infinite = true;
        report.witness = cube;
      }
    }
  }
  if (report.infinite) report.value = S{};
  return report;
}

template <class S>
BasicFamilyCheck<S> family_carleson_check(const Grid& g, const CubeFamily& family,
                                          const BasicLeafMeasure<S>& m,
                                          const S& c) {
  validate_family(g, family);
  require(c > S{}, Errc::invalid_input, "the Carleson level must be positive");
  BasicCubeMap<S> masses;
  for (CubeId q : family.cubes) masses.emplace(q, m.cube_mass(q));
  const std::vector<S> load = cube_tree_sums(g, masses);
  BasicFamilyCheck<S> result;
  bool have_worst = false;
  for (CubeId P : family.cubes) {
    const S& total = load[g.cube_key(P)];
    const S& mass = m.cube_mass(P);
    if (mass > S{}) {
      S ratio = total / mass;
      if (!have_worst || ratio > result.worst_ratio) {
        have_worst = true;
        result.worst_ratio = ratio;
        result.worst = P;
      }
      if (ratio > c) result.ok = false;
    } else if (total > S{}) {
      result.ok = false;
      if (!result.infinite) {
        result.infinite = true;
        result.worst = P;
      }
    }
  }
  return result;
}

template <class S>
BasicFractionalSet<S> prefix_select(const Grid& g,
                                    const BasicFractionalSet<S>& available,
                                    const BasicLeafMeasure<S>& m, const S& t,
                                    const BasicFractionalSet<S>& exclude,
                                    bool atomic_mode) {
  validate_fractional_set(g, available);
  validate_fractional_set(g, exclude);
  require(t >= S{}, Errc::invalid_input, "selection target must be nonnegative");

  BasicFractionalSet<S> out;
  if (t == S{}) return out;

  S acc{};
  for (const auto& [leaf, avail_fr] : available.fractions) {
    const S& mass = m.leaf_mass(leaf);
    if (mass == S{}) continue;
    const S taken = exclude.fraction(leaf);
    if (taken >= avail_fr) continue;
    const S free = avail_fr - taken;

    if (atomic_mode) {
      require(avail_fr == S{1} && (taken == S{} || taken == S{1}),
              Errc::invalid_input,
              "atomic mode requires whole-leaf sets");
      out.set(leaf, S{1});
      acc += mass;
      if (acc >= t) return out;
      continue;
    }

    const S capacity = free * mass;
    if (acc + capacity < t) {
      out.set(leaf, free);
      acc += capacity;
    } else {
      out.set(leaf, (t - acc) / mass);
      return out;
    }
  }

  if constexpr (std::is_same_v<S, double>) {
    if (t - acc <= select_slack(t)) return out;
  }
  fail(Errc::mass_unavailable,
       "not enough free mass to select the requested amount");
}

template <class S>
BasicAllocationOutcome<S> dor_allocate(const Grid& g,
                                       const BasicCubeMap<S>& lambda,
                                       const BasicLeafMeasure<S>& m, const S& C,
                                       bool atomic_mode) {
  require(C > S{}, Errc::invalid_input, "the Carleson level must be positive");
  for (const auto& [cube, v] : lambda) {
    g.check(cube);
    require(v >= S{}, Errc::invalid_input, "coefficients must be nonnegative");
  }

  BasicAllocationOutcome<S> out;
  BasicFractionalSet<S> used;
  for (const auto& [cube, v] : bottom_up(lambda)) {
    const S target = v / C;
    BasicFractionalSet<S> piece;
    try {
      piece = prefix_select(g, full_cube_set<S>(g, cube), m, target, used,
                            atomic_mode);
    } catch (const Error& e) {
      if (e.code() != Errc::mass_unavailable) throw;
      out.feasible = false;
      out.infeasible_at = cube;
      out.allocation.sets.clear();
      return out;
    }
    for (const auto& [leaf, fr] : piece.fractions) {
      auto [it, fresh] = used.fractions.emplace(leaf, fr);
      if (!fresh) it->second += fr;
    }
    out.allocation.sets.emplace(cube, std::move(piece));
  }
  return out;
}

template <class S>
BasicSparsenessResult<S> is_sigma_sparse(const Grid& g, const CubeFamily& family,
                                         const BasicLeafMeasure<S>& m,
                                         const S& delta) {
  validate_family(g, family);
  require(delta > S{} && delta <= S{1}, Errc::invalid_input,
          "the sparseness constant must lie in (0,1]");
  BasicCubeMap<S> demands;
  for (CubeId q : family.cubes) demands.emplace(q, delta * m.cube_mass(q));

  BasicSparsenessResult<S> result;
  BasicFractionalSet<S> used;
  for (const auto& [cube, target] : bottom_up(demands)) {
    BasicFractionalSet<S> piece;
    try {
      piece = prefix_select(g, full_cube_set<S>(g, cube), m, target, used);
    } catch (const Error& e) {
      if (e.code() != Errc::mass_unavailable) throw;
      result.sparse = false;
      result.failure = cube;
      result.witness.sets.clear();
      return result;
    }
    for (const auto& [leaf, fr] : piece.fractions) {
      auto [it, fresh] = used.fractions.emplace(leaf, fr);
      if (!fresh) it->second += fr;
    }
    result.witness.sets.emplace(cube, std::move(piece));
  }
  return result;
}

namespace {

double composition_count(int units, int parts) {
  // C(units + parts - 1, parts - 1)
  double total = 1.0;
  for (int i = 1; i < parts; ++i)
    total *= static_cast<double>(units + i) / static_cast<double>(i);
  return total;
}

void enumerate_compositions(int units, int parts,
                            std::vector<std::vector<int>>& out) {
  std::vector<int> current(parts, 0);
  // Lexicographic walk over all splits of `units` into `parts` bins.
  auto rec = [&](auto&& self, int index, int remaining) -> void {
    if (index == parts - 1) {
      current[index] = remaining;
      out.push_back(current);
      return;
    }
    for (int u = 0; u <= remaining; ++u) {
      current[index] = u;
      self(self, index + 1, remaining - u);
    }
  };
  rec(rec, 0, units);
}

struct LeafChoice {
  std::uint64_t leaf = 0;
  double mass = 0.0;
  std::vector<int> cubes;  // indices into the support list
};

}  // namespace

double lambda2_bruteforce(const Grid& g, const CubeCoefficients& lambda,
                          const LeafMeasure& m, int resolution) {
  validate_coefficients(g, lambda);
  require(resolution >= 2, Errc::invalid_input,
          "the search resolution must be at least 2");

  std::vector<CubeId> supp;
  std::vector<double> coeff;
  for (const auto& [cube, v] : lambda.values) {
    if (v <= 0.0) continue;
    supp.push_back(cube);
    coeff.push_back(v);
  }
  if (supp.empty()) return 0.0;
  for (CubeId q : supp)
    if (m.cube_mass(q) == 0.0) return infinity;

  std::vector<LeafChoice> choices;
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
    if (m.leaf_mass(leaf) == 0.0) continue;
    LeafChoice choice{leaf, m.leaf_mass(leaf), {}};
    for (std::size_t i = 0; i < supp.size(); ++i)
      if (g.contains(supp[i], g.leaf_cube(leaf))) choice.cubes.push_back(int(i));
    if (!choice.cubes.empty()) choices.push_back(std::move(choice));
  }

  // The whole free mass should be handed out: enlarging any piece can only
  // lower the objective. So each positive-mass leaf splits completely among
  // the supported cubes containing it.
  constexpr double kBudget = 2e6;
  int coarse = resolution;
  auto state_count = [&](int units) {
    double total = 1.0;
    for (const LeafChoice& c : choices) {
      total *= composition_count(units, static_cast<int>(c.cubes.size()));
      if (total > 1e18) break;
    }
    return total;
  };
  while (coarse > 1 && state_count(coarse) > kBudget) --coarse;
  require(state_count(coarse) <= kBudget, Errc::too_large,
          "allocation search space exceeds the desk-scale budget");

  std::vector<std::vector<std::vector<int>>> splits(choices.size());
  for (std::size_t i = 0; i < choices.size(); ++i)
    enumerate_compositions(coarse, static_cast<int>(choices[i].cubes.size()),
                           splits[i]);

  const auto objective = [&](const std::vector<double>& masses) {
    double worst = 0.0;
    for (std::size_t i = 0; i < supp.size(); ++i) {
      if (masses[i] <= 0.0) return infinity;
      worst = std::max(worst, coeff[i] / masses[i]);
    }
    return worst;
  };

  // fractions[i][j]: share of leaf i handed to choices[i].cubes[j]
  std::vector<std::vector<double>> best_fractions(choices.size());
  double best = infinity;
  std::vector<double> masses(supp.size(), 0.0);
  std::vector<std::vector<double>> current(choices.size());

  auto dfs = [&](auto&& self, std::size_t index) -> void {
    if (index == choices.size()) {
      const double value = objective(masses);
      if (value < best) {
        best = value;
        best_fractions = current;
      }
      return;
    }
    const LeafChoice& c = choices[index];
    for (const std::vector<int>& split : splits[index]) {
      std::vector<double> fr(c.cubes.size());
      for (std::size_t j = 0; j < c.cubes.size(); ++j) {
        fr[j] = static_cast<double>(split[j]) / coarse;
        masses[c.cubes[j]] += fr[j] * c.mass;
      }
      current[index] = fr;
      self(self, index + 1);
      for (std::size_t j = 0; j < c.cubes.size(); ++j)
        masses[c.cubes[j]] -= fr[j] * c.mass;
    }
  };
  dfs(dfs, 0);

  if (best == infinity) return best;

  // Polish: re-optimize one leaf at a time on a finer grid until stable.
  std::vector<double> base(supp.size(), 0.0);
  for (std::size_t i = 0; i < choices.size(); ++i)
    for (std::size_t j = 0; j < choices[i].cubes.size(); ++j)
      base[choices[i].cubes[j]] += best_fractions[i][j] * choices[i].mass;

  for (int sweep = 0; sweep < 50; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      const LeafChoice& c = choices[i];
      if (c.cubes.size() < 2) continue;
      int fine = std::max(resolution, 64);
      while (fine > coarse &&
             composition_count(fine, static_cast<int>(c.cubes.size())) > 1e5)
        fine /= 2;
      std::vector<std::vector<int>> local;
      enumerate_compositions(fine, static_cast<int>(c.cubes.size()), local);

      std::vector<double> without = base;
      for (std::size_t j = 0; j < c.cubes.size(); ++j)
        without[c.cubes[j]] -= best_fractions[i][j] * c.mass;

      std::vector<double> trial = without;
      for (const std::vector<int>& split : local) {
        for (std::size_t j = 0; j < c.cubes.size(); ++j)
          trial[c.cubes[j]] =
              without[c.cubes[j]] +
              (static_cast<double>(split[j]) / fine) * c.mass;
        const double value = objective(trial);
        if (value < best * (1.0 - 1e-12)) {
          best = value;
          for (std::size_t j = 0; j < c.cubes.size(); ++j)
            best_fractions[i][j] = static_cast<double>(split[j]) / fine;
          improved = true;
        }
        for (std::size_t j = 0; j < c.cubes.size(); ++j)
          trial[c.cubes[j]] = without[c.cubes[j]];
      }

      base = without;
      for (std::size_t j = 0; j < c.cubes.size(); ++j)
        base[c.cubes[j]] += best_fractions[i][j] * c.mass;
    }
    if (!improved) break;
  }

  // Transfer sweeps with shrinking steps: slide a unit of one leaf's share
  // between two of its cubes, then quarter the unit. Moves are accepted when
  // they lower the sorted ratio profile lexicographically; comparing past the
  // maximum lets the sweep cross plateaus where one cube stays worst while a
  // nearly-as-tight cube blocks its relief.
  auto profile_of = [&](const std::vector<double>& masses) {
    std::vector<double> ratios(supp.size());
    for (std::size_t i = 0; i < supp.size(); ++i)
      ratios[i] = masses[i] <= 0.0 ? infinity : coeff[i] / masses[i];
    std::sort(ratios.begin(), ratios.end(), std::greater<>());
    return ratios;
  };
  auto lex_less = [](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] < b[k] * (1.0 - 1e-12)) return true;
      if (a[k] > b[k] * (1.0 + 1e-12)) return false;
    }
    return false;
  };
  std::vector<double> profile = profile_of(base);
  for (double step = 1.0 / 64; step >= 1.0 / 65536; step /= 4) {
    for (int sweep = 0; sweep < 64; ++sweep) {
      bool improved = false;
      for (std::size_t i = 0; i < choices.size(); ++i) {
        const LeafChoice& c = choices[i];
        if (c.cubes.size() < 2) continue;
        for (std::size_t from = 0; from < c.cubes.size(); ++from) {
          for (std::size_t to = 0; to < c.cubes.size(); ++to) {
            if (from == to) continue;
            for (double delta :
                 {std::min(step, best_fractions[i][from]), best_fractions[i][from]}) {
              if (delta <= 0.0) continue;
              std::vector<double> trial = base;
              trial[c.cubes[from]] -= delta * c.mass;
              trial[c.cubes[to]] += delta * c.mass;
              std::vector<double> trial_profile = profile_of(trial);
              if (lex_less(trial_profile, profile)) {
                profile = std::move(trial_profile);
                best = std::min(best, profile.front());
                best_fractions[i][from] -= delta;
                best_fractions[i][to] += delta;
                base = std::move(trial);
                improved = true;
              }
            }
          }
        }
      }
      if (!improved) break;
    }
  }
  return std::min(best, profile.front());
}

CubeId pi_family(const Grid& g, const CubeFamily& family, CubeId q) {
  g.check(q);
  validate_family(g, family);
  for (int level = q.level; level >= 0; --level) {
    const CubeId anc = g.ancestor_at_level(q, level);
    if (family.contains(anc)) return anc;
  }
  fail(Errc::not_covered, "no family cube contains the given cube");
}

std::vector<CubeId> family_children(const Grid& g, const CubeFamily& family,
                                    CubeId parent) {
  g.check(parent);
  validate_family(g, family);
  require(family.contains(parent), Errc::invalid_input,
          "the parent cube must belong to the family");
  std::vector<CubeId> out;
  for (CubeId f : family.cubes) {
    if (f == parent || !g.contains(parent, f)) continue;
    bool direct = true;
    for (int level = f.level - 1; level > parent.level; --level) {
      if (family.contains(g.ancestor_at_level(f, level))) {
        direct = false;
        break;
      }
    }
    if (direct) out.push_back(f);
  }
  return out;
}

FractionalSet family_exclusive_set(const Grid& g, const CubeFamily& family,
                                   CubeId parent) {
  FractionalSet set = full_cube_set<double>(g, parent);
  for (CubeId child : family_children(g, family, parent)) {
    const LeafRange range = g.leaves_under(child);
    for (std::uint64_t leaf = range.first; leaf < range.last; ++leaf)
      set.fractions.erase(leaf);
  }
  return set;
}

CubeFamily stopping_family(const Grid& g, const LeafFunction& f,
                           const LeafMeasure& m, double threshold) {
  check_function(g, f);
  check_nonnegative(f);
  require(threshold > 1.0, Errc::invalid_input,
          "the stopping threshold must exceed 1");
  require(m.total() > 0.0, Errc::zero_measure,
          "the stopping construction needs a measure of positive total mass");

  std::vector<double> weighted(g.leaf_count());
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    weighted[leaf] = f[leaf] * m.leaf_mass(leaf);
  const std::vector<double> integral = subtree_sums(g, weighted);

  CubeFamily family;
  family.cubes.insert(g.root());

  // Depth-first over (cube, average over the nearest stopping ancestor).
  auto walk = [&](auto&& self, CubeId q, double base) -> void {
    if (g.is_leaf(q)) return;
    for (CubeId child : g.children(q)) {
      const double mass = m.cube_mass(child);
      if (mass == 0.0) continue;
      const double avg = integral[g.cube_key(child)] / mass;
      if (avg > threshold * base) {
        family.cubes.insert(child);
        self(self, child, avg);
      } else {
        self(self, child, base);
      }
    }
  };
  walk(walk, g.root(), integral[0] / m.total());
  return family;
}

double carleson_embedding_lhs(const Grid& g, const CubeFamily& family,
                              const LeafFunction& f, const LeafMeasure& m,
                              double p) {
  validate_family(g, family);
  check_function(g, f);
  require(p >= 1.0 && p != infinity, Errc::invalid_input,
          "the exponent must be finite and at least 1");
  double total = 0.0;
  for (CubeId q : family.cubes) {
    const double mass = m.cube_mass(q);
    if (mass == 0.0) continue;
    total += mass * std::pow(std::abs(integrate(f, m, q)) / mass, p);
  }
  return total;
}

template BasicCarlesonReport<double> carleson_constant<double>(
    const Grid&, const BasicCubeMap<double>&, const BasicLeafMeasure<double>&);
template BasicCarlesonReport<Rational> carleson_constant<Rational>(
    const Grid&, const BasicCubeMap<Rational>&,
    const BasicLeafMeasure<Rational>&);

template BasicFamilyCheck<double> family_carleson_check<double>(
    const Grid&, const CubeFamily&, const BasicLeafMeasure<double>&,
    const double&);
template BasicFamilyCheck<Rational> family_carleson_check<Rational>(
    const Grid&, const CubeFamily&, const BasicLeafMeasure<Rational>&,
    const Rational&);

template BasicFractionalSet<double> prefix_select<double>(
    const Grid&, const BasicFractionalSet<double>&,
    const BasicLeafMeasure<double>&, const double&,
    const BasicFractionalSet<double>&, bool);
template BasicFractionalSet<Rational> prefix_select<Rational>(
    const Grid&, const BasicFractionalSet<Rational>&,
    const BasicLeafMeasure<Rational>&, const Rational&,
    const BasicFractionalSet<Rational>&, bool);

template BasicAllocationOutcome<double> dor_allocate<double>(
    const Grid&, const BasicCubeMap<double>&, const BasicLeafMeasure<double>&,
    const double&, bool);
template BasicAllocationOutcome<Rational> dor_allocate<Rational>(
    const Grid&, const BasicCubeMap<Rational>&,
    const BasicLeafMeasure<Rational>&, const Rational&, bool);

template BasicSparsenessResult<double> is_sigma_sparse<double>(
    const Grid&, const CubeFamily&, const BasicLeafMeasure<double>&,
    const double&);
template BasicSparsenessResult<Rational> is_sigma_sparse<Rational>(
    const Grid&, const CubeFamily&, const BasicLeafMeasure<Rational>&,
    const Rational&);

}  // namespace dyadic
