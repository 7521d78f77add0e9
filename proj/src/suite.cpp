#include "dyadic/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t seed, int criterion, std::int64_t index) {
  return splitmix64(splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(criterion))) +
                    static_cast<std::uint64_t>(index));
}

struct Sampler {
  std::mt19937_64 engine;

  explicit Sampler(std::uint64_t seed) : engine(seed) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(engine);
  }
  int pick_int(int a, int b) {
    return std::uniform_int_distribution<int>(a, b)(engine);
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
};

// Deterministic work distribution: every index is processed exactly once and
// results land in index order regardless of the thread count.
template <class Worker>
void parallel_for(std::int64_t count, int threads, Worker&& worker) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) worker(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  int used = static_cast<int>(std::min<std::int64_t>(threads, count));
  pool.reserve(used);
  for (int t = 0; t < used; ++t) {
    pool.emplace_back([&] {
      for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        worker(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

Grid sample_grid(Sampler& s, int max_dim, int max_depth) {
  int n = s.pick_int(1, max_dim);
  int depth = s.pick_int(0, max_depth);
  return Grid(n, depth);
}

std::vector<double> sample_masses(Sampler& s, std::uint64_t count, double zero_p,
                                  double lo = 0.05, double hi = 2.0) {
  std::vector<double> m(count);
  for (double& v : m) v = s.chance(zero_p) ? 0.0 : s.uniform(lo, hi);
  return m;
}

std::vector<double> sample_integer_masses(Sampler& s, std::uint64_t count, double zero_p,
                                          int hi = 6) {
  std::vector<double> m(count);
  for (double& v : m) v = s.chance(zero_p) ? 0.0 : static_cast<double>(s.pick_int(1, hi));
  return m;
}

CubeCoefficients sample_lambda(Sampler& s, const Grid& g, double keep_p,
                               const LeafMeasure* positive_on = nullptr) {
  CubeCoefficients out;
  for (std::uint64_t key = 0; key < g.cube_count(); ++key) {
    CubeId q = g.cube_at(key);
    bool keep = s.chance(keep_p);
    if (!keep) continue;
    if (positive_on != nullptr && positive_on->cube_mass(q) <= 0) continue;
    out.values[q] = s.uniform(0.1, 2.0);
  }
  return out;
}

CubeVector sample_vector(Sampler& s, const Grid& g, double keep_p) {
  CubeVector out;
  for (std::uint64_t key = 0; key < g.cube_count(); ++key) {
    CubeId q = g.cube_at(key);
    bool keep = s.chance(keep_p);
    if (!keep) continue;
    out.values[q] = s.uniform(-2.0, 2.0);
  }
  return out;
}

LeafFunction sample_function(Sampler& s, const Grid& g, double zero_p, double hi = 2.0) {
  std::vector<double> values(g.leaf_count());
  for (double& v : values) v = s.chance(zero_p) ? 0.0 : s.uniform(0.05, hi);
  return LeafFunction(std::move(values));
}

Exponents sample_exponents(Sampler& s) {
  static const std::pair<double, double> pq[] = {
      {2.0, 1.5}, {2.5, 1.5}, {3.0, 1.5}, {2.5, 2.0}, {3.0, 2.0}};
  auto [p, q] = pq[s.pick_int(0, 4)];
  int mode = s.pick_int(0, 2);
  double sv = mode == 0 ? q : (mode == 1 ? 2 * q : infinity);
  return Exponents::make(p, q, sv);
}

struct Entry {
  Json json;
  bool pass = true;
  double seconds = 0;
};

Json base_entry(int id, const char* name, std::int64_t instances) {
  return Json{{"id", id}, {"name", name}, {"instances", instances}};
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// 1. <T f, g> computed cube-by-cube equals the leaf-side integral of
// f * T*(g) against sigma.
Entry criterion_adjoint(const SuiteOptions& options, std::int64_t count) {
  Timer timer;
  std::vector<double> rel(count, 0.0);
  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 1, idx));
    Grid grid = sample_grid(s, 2, 4);
    LeafMeasure sigma(grid, sample_masses(s, grid.leaf_count(), 0.2), "sigma");
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.2), "mu");
    CubeCoefficients lambda = sample_lambda(s, grid, 0.3);
    LeafFunction f = sample_function(s, grid, 0.2);
    CubeVector g = sample_vector(s, grid, 0.3);

    double lhs = pairing(grid, lambda, sigma, mu, f, g, true);
    LeafFunction h = apply_T_star(grid, lambda, mu, g);
    std::vector<double> product(grid.leaf_count());
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      product[leaf] = f[leaf] * h[leaf];
    }
    double rhs = integrate(LeafFunction(std::move(product)), sigma);
    rel[idx] = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  });

  double worst = 0;
  for (double r : rel) worst = std::max(worst, r);
  Entry entry;
  entry.seconds = timer.seconds();
  bool in_time = entry.seconds < 10.0;
  entry.pass = worst <= 1e-12 && in_time;
  entry.json = base_entry(1, "adjoint_identity", count);
  entry.json["max_rel_error"] = worst;
  entry.json["time_limit_s"] = 10.0;
  entry.json["pass"] = entry.pass;
  return entry;
}

double naive_mixed_norm(const Grid& g, const CubeVector& v, double s, double q,
                        const LeafMeasure& mu) {
  double total = 0;
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
    double aggregate = 0;
    for (CubeId cube : g.ancestors(leaf)) {
      double value = std::abs(v.at(cube));
      if (s == infinity) {
        aggregate = std::max(aggregate, value);
      } else {
        aggregate += std::pow(value, s);
      }
    }
    if (s != infinity) aggregate = std::pow(aggregate, 1.0 / s);
    total += mu.leaf_mass(leaf) * std::pow(aggregate, q);
  }
  return std::pow(total, 1.0 / q);
}

// 2. mixed_norm against the per-leaf materialized oracle, s = infinity
// included.
Entry criterion_mixed_oracle(const SuiteOptions& options, std::int64_t count) {
  static const double s_menu[] = {1.0, 1.5, 2.0, 4.0, infinity};
  static const double q_menu[] = {1.0, 1.5, 2.0, 3.0};
  std::vector<double> rel(count, 0.0);
  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 2, idx));
    Grid grid = sample_grid(s, 2, 4);
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.2), "mu");
    CubeVector v = sample_vector(s, grid, 0.4);
    double sv = s_menu[idx % 5];
    double qv = q_menu[idx % 4];
    double got = mixed_norm(grid, v, sv, qv, mu);
    double want = naive_mixed_norm(grid, v, sv, qv, mu);
    rel[idx] = std::abs(got - want) / std::max({1.0, got, want});
  });

  double worst = 0;
  for (double r : rel) worst = std::max(worst, r);
  Entry entry;
  entry.pass = worst <= 1e-12;
  entry.json = base_entry(2, "mixed_norm_oracle", count);
  entry.json["max_rel_error"] = worst;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 3. Superadditivity and the 3p upper bound for sums over a sparse family of
// functions constant on the family children.
Entry criterion_sparse_sums(const SuiteOptions& options, std::int64_t count) {
  static const double p_menu[] = {1.5, 2.0, 3.0};
  struct Out {
    bool pass = true;
    double lower_ratio = 0;  // lhs / ||sum||, must stay <= 1
    double upper_ratio = 0;  // ||sum|| / (3p lhs), must stay <= 1
  };
  std::vector<Out> results(count);

  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 3, idx));
    Grid grid = sample_grid(s, 2, 4);
    std::vector<double> masses = sample_masses(s, grid.leaf_count(), 0.1);
    masses[0] = std::max(masses[0], 0.1);
    LeafMeasure sigma(grid, masses, "sigma");
    LeafFunction driver = sample_function(s, grid, 0.0, 3.0);
    CubeFamily family = stopping_family(grid, driver, sigma, 2.0);
    double p = p_menu[idx % 3];

    std::vector<double> sum(grid.leaf_count(), 0.0);
    double power_sum = 0;
    for (CubeId F : family.cubes) {
      std::vector<double> a(grid.leaf_count(), 0.0);
      double base = s.chance(0.25) ? 0.0 : s.uniform(0.1, 3.0);
      FractionalSet exclusive = family_exclusive_set(grid, family, F);
      for (const auto& [leaf, fraction] : exclusive.fractions) {
        if (fraction > 0) a[leaf] = base;
      }
      for (CubeId child : family_children(grid, family, F)) {
        double value = s.chance(0.25) ? 0.0 : s.uniform(0.1, 3.0);
        LeafRange range = grid.leaves_under(child);
        for (std::uint64_t leaf = range.first; leaf < range.last; ++leaf) a[leaf] = value;
      }
      power_sum += std::pow(lp_norm(LeafFunction(a), p, sigma), p);
      for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) sum[leaf] += a[leaf];
    }

    double lhs = std::pow(power_sum, 1.0 / p);
    double norm = lp_norm(LeafFunction(std::move(sum)), p, sigma);
    Out out;
    if (norm > 0) out.lower_ratio = lhs / norm;
    if (lhs > 0) out.upper_ratio = norm / (3.0 * p * lhs);
    out.pass = lhs <= norm * (1.0 + 1e-12) && norm <= 3.0 * p * lhs * (1.0 + 1e-12);
    if (norm == 0 && lhs == 0) out.pass = true;
    results[idx] = out;
  });

  Entry entry;
  double lower = 0, upper = 0;
  for (const Out& out : results) {
    entry.pass = entry.pass && out.pass;
    lower = std::max(lower, out.lower_ratio);
    upper = std::max(upper, out.upper_ratio);
  }
  entry.json = base_entry(3, "sparse_sum_bounds", count);
  entry.json["max_lower_ratio"] = lower;
  entry.json["max_upper_ratio"] = upper;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 4. Constructive sparseness against the factor-2 Carleson packing test, in
// exact arithmetic.
Entry criterion_sparse_carleson(const SuiteOptions& options, std::int64_t count) {
  struct Out {
    bool pass = true;
    bool sparse = false;
  };
  std::vector<Out> results(count);

  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 4, idx));
    static const std::pair<int, int> shapes[] = {{1, 2}, {1, 3}, {2, 1}, {2, 2}};
    auto [n, depth] = shapes[s.pick_int(0, 3)];
    Grid grid(n, depth);
    std::vector<double> ints = sample_integer_masses(s, grid.leaf_count(), 0.25);
    std::vector<Rational> exact;
    for (double v : ints) exact.emplace_back(rational_from_double(v));
    RationalLeafMeasure sigma(grid, exact, "sigma");

    CubeFamily family;
    for (std::uint64_t key = 0; key < grid.cube_count(); ++key) {
      if (s.chance(0.35)) family.cubes.insert(grid.cube_at(key));
    }
    if (family.cubes.empty()) family.cubes.insert(grid.root());

    auto direct = is_sigma_sparse<Rational>(grid, family, sigma, Rational(1) / 2);
    auto packing = family_carleson_check<Rational>(grid, family, sigma, Rational(2));

    Out out;
    out.sparse = direct.sparse;
    out.pass = direct.sparse == packing.ok;
    if (direct.sparse && out.pass) {
      try {
        validate_allocation(grid, direct.witness, 0.0);
      } catch (const Error&) {
        out.pass = false;
      }
      for (CubeId F : family.cubes) {
        auto it = direct.witness.sets.find(F);
        Rational got = it == direct.witness.sets.end() ? Rational(0) : sigma.set_mass(it->second);
        if (got < sigma.cube_mass(F) / 2) out.pass = false;
      }
    }
    results[idx] = out;
  });

  Entry entry;
  std::int64_t sparse_count = 0;
  for (const Out& out : results) {
    entry.pass = entry.pass && out.pass;
    sparse_count += out.sparse ? 1 : 0;
  }
  entry.json = base_entry(4, "sparse_iff_carleson", count);
  entry.json["sparse_instances"] = sparse_count;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 5. The allocation construction at level C = Carleson constant hits its
// mass targets, exactly in rational arithmetic and to 1e-9 in floats; the
// fixed atomic counterexample stays infeasible.
Entry criterion_allocation(const SuiteOptions& options, std::int64_t count) {
  struct Out {
    bool pass = true;
  };
  std::vector<Out> results(count);

  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 5, idx));
    static const std::pair<int, int> shapes[] = {{1, 2}, {1, 3}, {2, 1}, {2, 2}};
    auto [n, depth] = shapes[s.pick_int(0, 3)];
    Grid grid(n, depth);
    std::vector<double> ints = sample_integer_masses(s, grid.leaf_count(), 0.2);
    ints[0] = std::max(ints[0], 1.0);
    std::vector<Rational> exact;
    for (double v : ints) exact.emplace_back(rational_from_double(v));
    RationalLeafMeasure mu_exact(grid, exact, "mu");
    LeafMeasure mu(grid, ints, "mu");

    BasicCubeMap<Rational> lambda_exact;
    CubeMap lambda;
    for (std::uint64_t key = 0; key < grid.cube_count(); ++key) {
      CubeId q = grid.cube_at(key);
      bool keep = s.chance(0.3);
      int value = s.pick_int(1, 4);
      if (!keep || mu_exact.cube_mass(q) == 0) continue;
      lambda_exact[q] = value;
      lambda[q] = value;
    }
    if (lambda_exact.empty()) {
      lambda_exact[grid.root()] = 1;
      lambda[grid.root()] = 1;
    }

    Out out;
    auto exact_rep = carleson_constant<Rational>(grid, lambda_exact, mu_exact);
    auto exact_outcome = dor_allocate<Rational>(grid, lambda_exact, mu_exact, exact_rep.value);
    out.pass = !exact_rep.infinite && exact_outcome.feasible;
    if (out.pass) {
      try {
        validate_allocation(grid, exact_outcome.allocation, 0.0);
      } catch (const Error&) {
        out.pass = false;
      }
      for (const auto& [q, value] : lambda_exact) {
        auto it = exact_outcome.allocation.sets.find(q);
        Rational got = it == exact_outcome.allocation.sets.end()
                           ? Rational(0)
                           : mu_exact.set_mass(it->second);
        if (got != value / exact_rep.value) out.pass = false;
      }
    }

    auto float_rep = carleson_constant<double>(grid, lambda, mu);
    auto float_outcome = dor_allocate<double>(grid, lambda, mu, float_rep.value);
    out.pass = out.pass && float_outcome.feasible;
    if (float_outcome.feasible) {
      for (const auto& [q, value] : lambda) {
        auto it = float_outcome.allocation.sets.find(q);
        double got = it == float_outcome.allocation.sets.end() ? 0.0 : mu.set_mass(it->second);
        double want = value / float_rep.value;
        if (std::abs(got - want) > 1e-9 * std::max(1.0, want)) out.pass = false;
      }
    }
    results[idx] = out;
  });

  Entry entry;
  for (const Out& out : results) entry.pass = entry.pass && out.pass;

  bool atomic_infeasible = true;
  bool fractional_feasible = true;
  if (count > 0) {
    // lambda = {root: 1/2, first child: 1/2}, mu = (1, 0), C = 1: divisible
    // mass splits the loaded leaf, whole leaves cannot.
    Grid grid(1, 1);
    RationalLeafMeasure mu(grid, {Rational(1), Rational(0)}, "mu");
    BasicCubeMap<Rational> lambda;
    lambda[grid.root()] = Rational(1) / 2;
    lambda[grid.children(grid.root())[0]] = Rational(1) / 2;

    auto fractional = dor_allocate<Rational>(grid, lambda, mu, Rational(1));
    fractional_feasible = fractional.feasible;
    for (const auto& [q, value] : lambda) {
      auto it = fractional.allocation.sets.find(q);
      Rational got = it == fractional.allocation.sets.end() ? Rational(0)
                                                            : mu.set_mass(it->second);
      fractional_feasible = fractional_feasible && got == value;
    }
    auto atomic = dor_allocate<Rational>(grid, lambda, mu, Rational(1), true);
    atomic_infeasible = !atomic.feasible && atomic.infeasible_at.has_value() &&
                        *atomic.infeasible_at == grid.root();
    entry.pass = entry.pass && atomic_infeasible && fractional_feasible;
  }

  entry.json = base_entry(5, "allocation_targets", count);
  entry.json["atomic_counterexample_infeasible"] = atomic_infeasible;
  entry.json["fractional_counterexample_feasible"] = fractional_feasible;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 6. The packing constant against the direct allocation search.
Entry criterion_lambda2(const SuiteOptions& options, std::int64_t count) {
  Timer timer;
  std::vector<double> rel(count, 0.0);
  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 6, idx));
    int depth = s.chance(0.3) ? 3 : s.pick_int(1, 2);
    Grid grid(1, depth);
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.0, 0.1, 2.0), "mu");

    CubeCoefficients lambda;
    int budget = 3;
    for (std::uint64_t key = 0; key < grid.cube_count() && budget > 0; ++key) {
      CubeId q = grid.cube_at(key);
      if (!s.chance(0.4)) continue;
      lambda.values[q] = s.uniform(0.2, 2.0);
      --budget;
    }
    if (lambda.values.empty()) lambda.values[grid.root()] = 1.0;

    double one = carleson_constant<double>(grid, lambda.values, mu).value;
    double two = lambda2_bruteforce(grid, lambda, mu, 24);
    rel[idx] = std::abs(one - two) / one;
  });

  double worst = 0;
  for (double r : rel) worst = std::max(worst, r);
  Entry entry;
  entry.seconds = timer.seconds();
  bool in_time = entry.seconds < 60.0;
  entry.pass = worst <= 0.02 && in_time;
  entry.json = base_entry(6, "packing_constant_bruteforce", count);
  entry.json["max_rel_gap"] = worst;
  entry.json["tolerance"] = 0.02;
  entry.json["time_limit_s"] = 60.0;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 7. Duality witness: the certified ratio reaches the aggregated potential
// and the witness stays inside the unit ball.
Entry criterion_duality(const SuiteOptions& options, std::int64_t count) {
  static const double s_menu[] = {1.5, 2.0, 4.0};
  struct Out {
    double gap = 0;          // a1 - ratio, must stay <= 1e-9
    double denominator = 0;  // must stay <= 1 + 1e-9
  };
  std::vector<Out> results(count);

  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 7, idx));
    Grid grid = sample_grid(s, 2, 4);
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.2), "mu");
    CubeCoefficients lambda = sample_lambda(s, grid, 0.3);
    DualityReport rep = a1_a2_witness(grid, lambda, mu, s_menu[idx % 3]);
    results[idx] = {rep.a1 - rep.ratio, rep.denominator};
  });

  Entry entry;
  double gap = -infinity, denom = 0;
  for (const Out& out : results) {
    gap = std::max(gap, out.gap);
    denom = std::max(denom, out.denominator);
  }
  if (count == 0) gap = 0;
  entry.pass = gap <= 1e-9 && denom <= 1.0 + 1e-9;
  entry.json = base_entry(7, "duality_witness", count);
  entry.json["max_gap"] = gap;
  entry.json["max_denominator"] = denom;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 8. Endpoint identities of the allocation functional: allocation
// independence at s = q, the pointwise-sup linearization at s = infinity.
Entry criterion_endpoints(const SuiteOptions& options, std::int64_t count) {
  struct Out {
    bool pass = true;
    double gap = 0;
  };
  std::vector<Out> results(count);

  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 8, idx));
    Grid grid = sample_grid(s, 2, 3);
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.2), "mu");
    CubeCoefficients b = sample_lambda(s, grid, 0.35);
    double q = idx % 4 < 2 ? 1.5 : 2.0;

    Out out;
    if (idx % 2 == 0) {
      DisjointAllocation random_sets;
      for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
        if (!s.chance(0.7)) continue;
        std::vector<CubeId> holders;
        for (CubeId cube : grid.ancestors(leaf)) {
          if (b.values.count(cube)) holders.push_back(cube);
        }
        if (holders.empty()) continue;
        CubeId target = holders[s.pick_int(0, static_cast<int>(holders.size()) - 1)];
        random_sets.sets[target].set(leaf, s.uniform(0.0, 1.0));
      }
      double with_sets = dorverbitsky_value(grid, b, mu, q, q, random_sets);
      double without = dorverbitsky_value(grid, b, mu, q, q, DisjointAllocation{});
      out.pass = with_sets == without;
      out.gap = std::abs(with_sets - without);
    } else {
      DisjointAllocation envelope;
      for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
        if (mu.leaf_mass(leaf) <= 0) continue;
        CubeId best{};
        double best_value = 0;
        for (CubeId cube : grid.ancestors(leaf)) {
          double value = b.at(cube);
          if (value > best_value) {
            best_value = value;
            best = cube;
          }
        }
        if (best_value > 0) envelope.sets[best].set(leaf, 1.0);
      }
      double enveloped = dorverbitsky_value(grid, b, mu, q, infinity, envelope);
      double pointwise = lp_norm(maximal_multiplier(grid, b), q, mu);
      out.gap = std::abs(enveloped - pointwise) / std::max({1.0, enveloped, pointwise});
      out.pass = out.gap <= 1e-10;
    }
    results[idx] = out;
  });

  Entry entry;
  double worst = 0;
  for (const Out& out : results) {
    entry.pass = entry.pass && out.pass;
    worst = std::max(worst, out.gap);
  }
  entry.json = base_entry(8, "allocation_endpoints", count);
  entry.json["max_gap"] = worst;
  entry.json["pass"] = entry.pass;
  return entry;
}

// The fixed instance pool shared by criteria 9 and 10.
struct FixedInstance {
  Grid grid;
  LeafMeasure sigma;
  LeafMeasure mu;
  CubeCoefficients lambda;
  Exponents e;
  std::uint64_t seed = 0;
};

std::vector<FixedInstance> build_fixed_pool(const SuiteOptions& options, std::int64_t count) {
  static const std::pair<int, int> shapes[] = {{1, 2}, {1, 3}, {2, 2}, {2, 3}};
  static const int quota[] = {20, 15, 10, 5};
  std::vector<FixedInstance> pool;
  std::int64_t made = 0;
  for (int shape = 0; shape < 4 && made < count; ++shape) {
    for (int i = 0; i < quota[shape] && made < count; ++i, ++made) {
      std::uint64_t seed = instance_seed(options.seed, 9, made);
      Sampler s(seed);
      Grid grid(shapes[shape].first, shapes[shape].second);
      LeafMeasure sigma(grid, sample_masses(s, grid.leaf_count(), 0.0, 0.05, 2.0), "sigma");
      LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.0, 0.05, 2.0), "mu");
      CubeCoefficients lambda = sample_lambda(s, grid, 0.35);
      if (lambda.values.empty()) lambda.values[grid.root()] = 1.0;
      Exponents e = sample_exponents(s);
      pool.push_back(FixedInstance{grid, sigma, mu, lambda, e, seed});
    }
  }
  return pool;
}

// Independent allocation search for the reduction condition: coarse
// composition grid over the per-leaf shares, then local transfer sweeps.
double reduction_allocation_oracle(const Grid& grid, const CubeCoefficients& lambda,
                                   const LeafMeasure& sigma, const LeafMeasure& mu,
                                   const Exponents& e) {
  std::vector<CubeId> cubes;
  for (const auto& [q, value] : lambda.values) {
    if (value > 0 && mu.cube_mass(q) > 0) cubes.push_back(q);
  }
  struct Leaf {
    std::uint64_t leaf;
    std::vector<int> cubes;
  };
  std::vector<Leaf> leaves;
  for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
    if (mu.leaf_mass(leaf) <= 0) continue;
    Leaf entry{leaf, {}};
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      if (grid.contains(cubes[i], grid.leaf_cube(leaf))) entry.cubes.push_back(static_cast<int>(i));
    }
    if (!entry.cubes.empty()) leaves.push_back(std::move(entry));
  }

  // shares[l][j]: fraction of leaf l handed to its j-th eligible cube.
  std::vector<std::vector<double>> shares(leaves.size());
  for (std::size_t l = 0; l < leaves.size(); ++l) shares[l].assign(leaves[l].cubes.size(), 0.0);

  auto evaluate = [&](const std::vector<std::vector<double>>& state) {
    DisjointAllocation sets;
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      for (std::size_t j = 0; j < state[l].size(); ++j) {
        if (state[l][j] > 0) sets.sets[cubes[leaves[l].cubes[j]]].set(leaves[l].leaf, state[l][j]);
      }
    }
    return reduction_condition_value(grid, lambda, sigma, mu, e, sets);
  };

  double best = evaluate(shares);
  auto best_state = shares;

  int units = 1;
  for (int u = 8; u >= 1; --u) {
    double states = 1;
    for (const Leaf& leaf : leaves) {
      double options_here = 1;
      for (std::size_t k = 0; k < leaf.cubes.size(); ++k) {
        options_here = options_here * (u + 1 + static_cast<int>(k)) / (k + 1);
      }
      states *= options_here;
      if (states > 5e4) break;
    }
    if (states <= 5e4) {
      units = u;
      break;
    }
  }

  // Depth-first enumeration of unit compositions per leaf.
  std::vector<std::vector<double>> state(shares);
  auto rec = [&](auto&& self, std::size_t l) -> void {
    if (l == leaves.size()) {
      double value = evaluate(state);
      if (value > best) {
        best = value;
        best_state = state;
      }
      return;
    }
    std::size_t k = leaves[l].cubes.size();
    std::vector<int> composition(k, 0);
    auto fill = [&](auto&& inner, std::size_t j, int remaining) -> void {
      if (j + 1 == k) {
        composition[j] = remaining;
        for (std::size_t i = 0; i < k; ++i) state[l][i] = static_cast<double>(composition[i]) / units;
        self(self, l + 1);
        // remaining may also stay unassigned: try all partial totals below.
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        composition[j] = take;
        inner(inner, j + 1, remaining - take);
      }
    };
    for (int total = 0; total <= units; ++total) fill(fill, 0, total);
  };
  if (!leaves.empty()) rec(rec, 0);

  // Local polish: move fractions between destinations (or release them) on a
  // short grid, keeping improvements. Transfers are clamped so rounding never
  // pushes a share outside [0,1].
  auto clamp01 = [](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); };
  for (int sweep = 0; sweep < 25; ++sweep) {
    bool improved = false;
    for (std::size_t l = 0; l < leaves.size(); ++l) {
      std::size_t k = best_state[l].size();
      for (std::size_t from = 0; from <= k; ++from) {
        double available = 0;
        if (from < k) {
          available = best_state[l][from];
        } else {
          double used = 0;
          for (double v : best_state[l]) used += v;
          available = 1.0 - used;
        }
        if (available <= 1e-12) continue;
        for (std::size_t to = 0; to < k; ++to) {
          if (to == from) continue;
          for (int step = 1; step <= 6; ++step) {
            double delta = available * step / 6.0;
            auto candidate = best_state;
            if (from < k) candidate[l][from] = clamp01(candidate[l][from] - delta);
            candidate[l][to] = clamp01(candidate[l][to] + delta);
            double value = evaluate(candidate);
            if (value > best * (1.0 + 1e-10)) {
              best = value;
              best_state = std::move(candidate);
              improved = true;
            }
          }
        }
        // Releasing mass can help when the exponent on the piece is negative.
        if (from < k) {
          auto candidate = best_state;
          candidate[l][from] = 0;
          double value = evaluate(candidate);
          if (value > best * (1.0 + 1e-10)) {
            best = value;
            best_state = std::move(candidate);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return best;
}

// 9. Homogeneity of both sides, the equivalence band on the fixed pool, and
// agreement with brute force on the smallest instances.
Entry criterion_equivalence(const SuiteOptions& options, std::int64_t hom_count,
                            const std::vector<FixedInstance>& pool) {
  struct HomOut {
    double gap = 0;
  };
  std::vector<HomOut> hom(hom_count);
  parallel_for(hom_count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 90, idx));
    Grid grid = sample_grid(s, 2, 3);
    LeafMeasure sigma(grid, sample_masses(s, grid.leaf_count(), 0.15), "sigma");
    LeafMeasure mu(grid, sample_masses(s, grid.leaf_count(), 0.15), "mu");
    Exponents e = sample_exponents(s);
    CubeVector v = sample_vector(s, grid, 0.4);
    double t = 3.7;

    double base = mixed_norm(grid, v, e, mu);
    CubeVector scaled = v;
    for (auto& [q, value] : scaled.values) value *= t;
    double mixed_gap = std::abs(mixed_norm(grid, scaled, e, mu) - t * base) /
                       std::max(1.0, t * base);

    CubeCoefficients lambda = sample_lambda(s, grid, 0.35);
    DisjointAllocation sets;
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      if (!s.chance(0.5)) continue;
      std::vector<CubeId> holders;
      for (CubeId cube : grid.ancestors(leaf)) {
        if (lambda.values.count(cube)) holders.push_back(cube);
      }
      if (holders.empty()) continue;
      sets.sets[holders[s.pick_int(0, static_cast<int>(holders.size()) - 1)]].set(
          leaf, s.uniform(0.0, 1.0));
    }
    double red_base = reduction_condition_value(grid, lambda, sigma, mu, e, sets);
    CubeCoefficients lambda_scaled = lambda;
    for (auto& [q, value] : lambda_scaled.values) value *= t;
    double red_scaled = reduction_condition_value(grid, lambda_scaled, sigma, mu, e, sets);
    double red_gap = std::abs(red_scaled - std::pow(t, e.q) * red_base) /
                     std::max(1.0, std::pow(t, e.q) * red_base);
    hom[idx] = {std::max(mixed_gap, red_gap)};
  });

  struct PoolOut {
    double ratio = 1;
    double oracle_gap = 0;
    bool pass = true;
  };
  std::vector<PoolOut> band(pool.size());
  parallel_for(static_cast<std::int64_t>(pool.size()), options.threads, [&](std::int64_t idx) {
    const FixedInstance& inst = pool[idx];
    AscentConfig config;
    config.seed = inst.seed;
    double norm = operator_norm(inst.grid, inst.lambda, inst.sigma, inst.mu, inst.e, config).value;
    double reduction =
        reduction_condition_sup(inst.grid, inst.lambda, inst.sigma, inst.mu, inst.e, config).value;

    PoolOut out;
    double rhs = std::pow(reduction, 1.0 / inst.e.q);
    out.ratio = rhs > 0 ? norm / rhs : infinity;
    out.pass = out.ratio >= 1.0 / 32.0 && out.ratio <= 32.0;

    if (inst.grid.leaf_count() <= 4) {
      double norm_bf = operator_norm_bruteforce(inst.grid, inst.lambda, inst.sigma, inst.mu,
                                                inst.e, 16);
      double norm_gap = std::abs(norm - norm_bf) / std::max(norm, norm_bf);
      double red_oracle = reduction_allocation_oracle(inst.grid, inst.lambda, inst.sigma,
                                                      inst.mu, inst.e);
      double red_gap = reduction > 0 || red_oracle > 0
                           ? std::abs(reduction - red_oracle) / std::max(reduction, red_oracle)
                           : 0.0;
      out.oracle_gap = std::max(norm_gap, red_gap);
      out.pass = out.pass && out.oracle_gap <= 0.01;
    }
    band[idx] = out;
  });

  Entry entry;
  double hom_worst = 0;
  for (const HomOut& out : hom) hom_worst = std::max(hom_worst, out.gap);
  double ratio_min = infinity, ratio_max = 0, oracle_worst = 0;
  for (const PoolOut& out : band) {
    entry.pass = entry.pass && out.pass;
    ratio_min = std::min(ratio_min, out.ratio);
    ratio_max = std::max(ratio_max, out.ratio);
    oracle_worst = std::max(oracle_worst, out.oracle_gap);
  }
  if (band.empty()) ratio_min = 0;
  entry.pass = entry.pass && hom_worst <= 1e-10;
  entry.json = base_entry(9, "norm_reduction_equivalence", hom_count + static_cast<std::int64_t>(pool.size()));
  entry.json["max_homogeneity_gap"] = hom_worst;
  entry.json["band_min"] = ratio_min;
  entry.json["band_max"] = ratio_max;
  entry.json["max_oracle_gap"] = oracle_worst;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 10. The two testing conditions stay under 16x the operator norm on the
// fixed pool with stopping-family certificates.
Entry criterion_necessity(const SuiteOptions& options, const std::vector<FixedInstance>& pool) {
  struct Out {
    double ratio1 = 0;
    double ratio2 = 0;
    bool pass = true;
  };
  std::vector<Out> results(pool.size());
  parallel_for(static_cast<std::int64_t>(pool.size()), options.threads, [&](std::int64_t idx) {
    const FixedInstance& inst = pool[idx];
    Sampler s(instance_seed(options.seed, 10, idx));
    AscentConfig config;
    config.seed = inst.seed;
    double norm = operator_norm(inst.grid, inst.lambda, inst.sigma, inst.mu, inst.e, config).value;

    Out out;
    CubeFamily G = stopping_family(inst.grid, sample_function(s, inst.grid, 0.0, 3.0), inst.mu, 2.0);
    CubeVector g = sample_vector(s, inst.grid, 0.4);
    Cond1Report r1 = cond1_value(inst.grid, inst.lambda, inst.sigma, inst.mu, inst.e, G, g);
    out.ratio1 = norm > 0 ? r1.value / norm : 0.0;
    out.pass = !r1.degenerate && r1.family_sparse && r1.value <= 16.0 * norm;

    CubeFamily F = stopping_family(inst.grid, sample_function(s, inst.grid, 0.0, 3.0), inst.sigma, 2.0);
    ConditionReport r2 = cond2_constant(inst.grid, inst.lambda, inst.sigma, inst.mu, inst.e, F, config);
    out.ratio2 = norm > 0 ? r2.value / norm : 0.0;
    out.pass = out.pass && r2.value <= 16.0 * norm;
    results[idx] = out;
  });

  Entry entry;
  double worst1 = 0, worst2 = 0;
  for (const Out& out : results) {
    entry.pass = entry.pass && out.pass;
    worst1 = std::max(worst1, out.ratio1);
    worst2 = std::max(worst2, out.ratio2);
  }
  entry.json = base_entry(10, "testing_condition_necessity", static_cast<std::int64_t>(pool.size()));
  entry.json["max_cond1_ratio"] = worst1;
  entry.json["max_cond2_ratio"] = worst2;
  entry.json["bound"] = 16.0;
  entry.json["pass"] = entry.pass;
  return entry;
}

// 11. Potentials: the two hand values, the exact sparse/full sandwich, the
// domination gate, and sparseness of the generated family.
Entry criterion_wolff(const SuiteOptions& options, std::int64_t count) {
  Entry entry;
  bool hand_ok = true;
  double hand_value = 0;
  double hand_condition = 0;
  if (count > 0) {
    Grid grid(1, 1);
    WolffParams w{0.5, 2.0};
    LeafFunction one(grid, 1.0);
    LeafFunction full = wolff_dyadic(grid, one, w);
    hand_value = full[0];
    hand_ok = full[0] == 1.5 && full[1] == 1.5;

    CubeFamily root_only;
    root_only.cubes.insert(grid.root());
    LeafFunction rooted = wolff_sparse(grid, one, w, root_only);
    hand_ok = hand_ok && rooted[0] == 1.0 && rooted[1] == 1.0;

    LeafMeasure flat(grid, {1.0, 1.0}, "sigma");
    Exponents e = Exponents::make(3.0, 2.0, 2.0);
    hand_condition = wolff_condition_value(grid, flat, flat, e, w, root_only);
    double want = 4.0 * std::pow(2.0, 1.0 / 3.0);
    hand_ok = hand_ok && std::abs(hand_condition - want) <= 1e-12 * want;
  }

  struct Out {
    bool pass = true;
    double domination = 0;
    double allowance = 0;
  };
  std::vector<Out> results(count);
  parallel_for(count, options.threads, [&](std::int64_t idx) {
    Sampler s(instance_seed(options.seed, 11, idx));
    int n = s.pick_int(1, 2);
    Grid grid(n, s.pick_int(1, 3));
    double sv = static_cast<double>(s.pick_int(1, 3));
    WolffParams w{s.uniform(0.5, 0.95 * n), sv};
    LeafFunction f = sample_function(s, grid, 0.0, 3.0);
    if (s.chance(0.3)) {
      f.values[s.pick_int(0, static_cast<int>(grid.leaf_count()) - 1)] *= 50.0;
    }

    Out out;
    LeafFunction full = wolff_dyadic(grid, f, w);

    CubeFamily random_family;
    for (std::uint64_t key = 0; key < grid.cube_count(); ++key) {
      if (s.chance(0.4)) random_family.cubes.insert(grid.cube_at(key));
    }
    LeafFunction part = wolff_sparse(grid, f, w, random_family);
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      if (part[leaf] > full[leaf]) out.pass = false;
    }
    CubeFamily everything;
    for (std::uint64_t key = 0; key < grid.cube_count(); ++key) {
      everything.cubes.insert(grid.cube_at(key));
    }
    LeafFunction same = wolff_sparse(grid, f, w, everything);
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      if (same[leaf] != full[leaf]) out.pass = false;
    }

    WolffFamilyReport report = wolff_sparse_family(grid, f, w, 2.0);
    out.domination = report.domination_ratio;
    out.allowance = std::pow(2.0, w.s) * 8.0;
    out.pass = out.pass && report.domination_ratio <= out.allowance;
    out.pass = out.pass &&
               is_sigma_sparse<double>(grid, report.family, lebesgue_measure(grid), 0.5).sparse;
    results[idx] = out;
  });

  double worst_fraction = 0;
  for (const Out& out : results) {
    entry.pass = entry.pass && out.pass;
    if (out.allowance > 0) {
      worst_fraction = std::max(worst_fraction, out.domination / out.allowance);
    }
  }
  entry.pass = entry.pass && hand_ok;
  entry.json = base_entry(11, "wolff_potentials", count);
  entry.json["hand_value"] = hand_value;
  entry.json["hand_condition"] = hand_condition;
  entry.json["hand_ok"] = hand_ok;
  entry.json["max_domination_fraction"] = worst_fraction;
  entry.json["pass"] = entry.pass;
  return entry;
}

}  // namespace

SuiteResult run_suite(const SuiteOptions& options) {
  require(options.threads >= 1, Errc::invalid_input, "threads must be at least 1");
  require(options.scale >= 0 && std::isfinite(options.scale), Errc::invalid_input,
          "scale must be a finite non-negative number");

  auto scaled = [&](std::int64_t base) {
    return static_cast<std::int64_t>(std::llround(base * options.scale));
  };

  std::vector<FixedInstance> pool = build_fixed_pool(options, scaled(50));

  std::vector<Entry> entries;
  entries.push_back(criterion_adjoint(options, scaled(1000)));
  entries.push_back(criterion_mixed_oracle(options, scaled(300)));
  entries.push_back(criterion_sparse_sums(options, scaled(200)));
  entries.push_back(criterion_sparse_carleson(options, scaled(500)));
  entries.push_back(criterion_allocation(options, scaled(500)));
  entries.push_back(criterion_lambda2(options, scaled(100)));
  entries.push_back(criterion_duality(options, scaled(300)));
  entries.push_back(criterion_endpoints(options, scaled(200)));
  entries.push_back(criterion_equivalence(options, scaled(100), pool));
  entries.push_back(criterion_necessity(options, pool));
  entries.push_back(criterion_wolff(options, scaled(100)));

  SuiteResult result;
  Json criteria = Json::array();
  std::ostringstream csv;
  csv << "criterion,name,instances,pass\n";
  for (const Entry& entry : entries) {
    result.pass = result.pass && entry.pass;
    csv << entry.json["id"].get<int>() << "," << entry.json["name"].get<std::string>() << ","
        << entry.json["instances"].get<std::int64_t>() << "," << (entry.pass ? 1 : 0) << "\n";
    if (entry.seconds > 0) {
      result.timings[entry.json["name"].get<std::string>()] = entry.seconds;
    }
    criteria.push_back(entry.json);
  }

  result.summary = Json{{"seed", options.seed},
                        {"scale", options.scale},
                        {"criteria", std::move(criteria)},
                        {"pass", result.pass}};
  result.csv = csv.str();
  return result;
}

}  // namespace dyadic
