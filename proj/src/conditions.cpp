#include "dyadic/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace dyadic {

const char* method_name(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::ascent: return "ascent";
    case Method::search: return "search";
  }
  return "unknown";
}

namespace {

// Best value so far, with the stopping rule from AscentConfig.
class ConvergenceTracker {
public:
  explicit ConvergenceTracker(const AscentConfig& c) : config_(c) {}

  // Returns true when the iteration should stop.
  bool update(double value) {
    best_ = std::max(best_, value);
    history_.push_back(best_);
    const int i = static_cast<int>(history_.size()) - 1;
    if (i >= config_.patience &&
        best_ <= history_[i - config_.patience] * (1.0 + config_.rel_tol))
      return true;
    return static_cast<int>(history_.size()) >= config_.max_iterations;
  }

  double best() const { return best_; }

private:
  const AscentConfig& config_;
  std::vector<double> history_;
  double best_ = 0.0;
};

std::mt19937_64 restart_engine(const AscentConfig& config, int restart) {
  return std::mt19937_64(config.seed * 0x9E3779B97F4A7C15ULL +
                         static_cast<std::uint64_t>(restart) + 1);
}

struct MixedNormGradient {
  double value = 0.0;
  CubeMap dv;  // derivative with respect to each stored component
};

// Value and gradient of v -> || (sum_Q |v_Q|^s chi_Q)^{1/s} ||_{L^q(mu)} at
// a nonnegative v. For s = infinity this is a subgradient: each leaf is
// attributed to the shallowest cube attaining its sup.
MixedNormGradient gradient_of_mixed_norm(const Grid& g, const CubeVector& v,
                                         double s, double q,
                                         const LeafMeasure& mu) {
  MixedNormGradient out;
  const LeafFunction a = ls_aggregate(g, v, s);
  out.value = lp_norm(a, q, mu);
  if (out.value <= 0.0) return out;
  const double scale = std::pow(out.value, 1.0 - q);

  if (s == infinity) {
    CubeMap bucket;
    for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
      if (mu.leaf_mass(leaf) == 0.0 || a[leaf] == 0.0) continue;
      CubeId argmax = g.root();
      double top = -1.0;
      for (CubeId anc : g.ancestors(leaf)) {
        auto it = v.values.find(anc);
        if (it == v.values.end()) continue;
        const double value = std::abs(it->second);
        if (value > top) {
          top = value;
          argmax = anc;
        }
      }
      bucket[argmax] += mu.leaf_mass(leaf) * std::pow(a[leaf], q - 1.0);
    }
    for (const auto& [cube, b] : bucket) out.dv.emplace(cube, b * scale);
    return out;
  }

  std::vector<double> w(g.leaf_count(), 0.0);
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    if (mu.leaf_mass(leaf) > 0.0 && a[leaf] > 0.0)
      w[leaf] = mu.leaf_mass(leaf) * std::pow(a[leaf], q - s);
  const std::vector<double> weight = subtree_sums(g, w);
  for (const auto& [cube, value] : v.values) {
    if (value == 0.0) continue;
    out.dv.emplace(cube, std::pow(value, s - 1.0) *
                             weight[g.cube_key(cube)] * scale);
  }
  return out;
}

double vector_lp(const std::vector<double>& x, double p) {
  double total = 0.0;
  for (double v : x) total += std::pow(std::abs(v), p);
  return std::pow(total, 1.0 / p);
}

// Shared core of the strong and weak first conditions.
Cond1Report cond1_core(const Grid& g, const CubeCoefficients& lambda,
                       const LeafMeasure& sigma, const LeafMeasure& m,
                       double p_conj, double mass_exponent, double s_conj,
                       double outer_r, const CubeFamily& family,
                       const CubeVector& v) {
  validate_coefficients(g, lambda);
  validate_cube_vector(g, v);
  validate_family(g, family);
  require(!family.cubes.empty(), Errc::invalid_input,
          "the first condition needs a nonempty family");

  Cond1Report report;
  report.family_sparse = is_sigma_sparse<double>(g, family, m).sparse;

  std::map<CubeId, CubeVector> groups;
  for (const auto& [cube, value] : v.values) {
    try {
      groups[pi_family(g, family, cube)].values.emplace(cube, value);
    } catch (const Error& err) {
      if (err.code() != Errc::not_covered) throw;
      ++report.skipped_components;
    }
  }

  double total = 0.0;
  for (const auto& [G, part] : groups) {
    Cond1Term term;
    term.cube = G;
    term.numerator = lp_norm(apply_T_star(g, lambda, m, part), p_conj, sigma);
    const double sup_factor = lp_norm(ls_aggregate(g, part, s_conj), infinity, m);
    term.denominator = std::pow(m.cube_mass(G), mass_exponent) * sup_factor;
    if (term.denominator == 0.0) {
      if (term.numerator == 0.0) continue;  // dropped by convention
      term.degenerate = true;
      term.value = infinity;
      report.degenerate = true;
    } else {
      term.value = term.numerator / term.denominator;
    }
    report.terms.push_back(term);
    if (!term.degenerate) total += std::pow(term.value, outer_r);
  }
  report.value = report.degenerate ? infinity : std::pow(total, 1.0 / outer_r);
  return report;
}

// The vector sum_F beta_F sigma(F)^{-1/p} T(chi_F) (or its localized
// variant), one component per positive coefficient.
CubeVector cond2_vector(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const CubeFamily& family,
                        const CubeMap& beta, double p, bool use_tf_sigma) {
  for (const auto& [F, b] : beta) {
    require(family.contains(F), Errc::invalid_input,
            "weights must be indexed by family cubes");
    require(std::isfinite(b) && b >= 0.0, Errc::invalid_input,
            "weights must be finite and nonnegative");
    require(b == 0.0 || sigma.cube_mass(F) > 0.0, Errc::invalid_input,
            "positive weights need cubes of positive sigma-mass");
  }
  CubeVector out;
  for (const auto& [Q, lam] : lambda.values) {
    if (lam == 0.0) continue;
    double total = 0.0;
    for (const auto& [F, b] : beta) {
      if (b == 0.0) continue;
      double cross;
      if (use_tf_sigma)
        cross = g.contains(F, Q) ? sigma.cube_mass(Q) : 0.0;
      else if (g.contains(Q, F))
        cross = sigma.cube_mass(F);
      else if (g.contains(F, Q))
        cross = sigma.cube_mass(Q);
      else
        cross = 0.0;
      if (cross == 0.0) continue;
      total += b * cross / std::pow(sigma.cube_mass(F), 1.0 / p);
    }
    if (total != 0.0) out.values.emplace(Q, lam * total);
  }
  return out;
}

double beta_norm(const CubeMap& beta, double p) {
  double total = 0.0;
  for (const auto& [F, b] : beta) total += std::pow(b, p);
  require(total > 0.0, Errc::zero_denominator,
          "the weight vector must not vanish identically");
  return std::pow(total, 1.0 / p);
}

// Compositions of `units` into `parts` bins.
void simplex_grid(int units, int parts, std::vector<std::vector<int>>& out) {
  std::vector<int> current(parts, 0);
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

double simplex_grid_size(int units, int parts) {
  double total = 1.0;
  for (int i = 1; i < parts; ++i)
    total *= static_cast<double>(units + i) / static_cast<double>(i);
  return total;
}

// Maximize a function over the simplex {w >= 0, sum w = 1}: full grid at a
// budgeted resolution, then pairwise-transfer sweeps with golden sections.
template <class F>
std::pair<double, std::vector<double>> maximize_on_simplex(int k, int resolution,
                                                           F&& value) {
  int units = resolution;
  while (units > 1 && simplex_grid_size(units, k) > 2e6) --units;
  std::vector<std::vector<int>> grid;
  simplex_grid(units, k, grid);

  double best = -infinity;
  std::vector<double> best_w(k, 0.0);
  std::vector<double> w(k);
  for (const std::vector<int>& point : grid) {
    for (int i = 0; i < k; ++i)
      w[i] = static_cast<double>(point[i]) / units;
    const double v = value(w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }

  constexpr double kGolden = 0.618033988749894848;
  for (int sweep = 0; sweep < 50; ++sweep) {
    bool improved = false;
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const double total = best_w[i] + best_w[j];
        if (total <= 0.0) continue;
        auto moved = [&](double x) {
          std::vector<double> trial = best_w;
          trial[i] = x;
          trial[j] = total - x;
          return value(trial);
        };
        double lo = 0.0, hi = total;
        double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
        double f1 = moved(x1), f2 = moved(x2);
        for (int iter = 0; iter < 60; ++iter) {
          if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = moved(x2);
          } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = moved(x1);
          }
        }
        const double candidates_x[4] = {x1, x2, 0.0, total};
        const double candidates_f[4] = {f1, f2, moved(0.0), moved(total)};
        int pick = 0;
        for (int c = 1; c < 4; ++c)
          if (candidates_f[c] > candidates_f[pick]) pick = c;
        if (candidates_f[pick] > best * (1.0 + 1e-12)) {
          best = candidates_f[pick];
          best_w[i] = candidates_x[pick];
          best_w[j] = total - candidates_x[pick];
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return {best, best_w};
}

}  // namespace

Cond1Report cond1_value(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        const Exponents& e, const CubeFamily& family,
                        const CubeVector& v) {
  return cond1_core(g, lambda, sigma, mu, e.p_conj, 1.0 / e.q_conj, e.s_conj,
                    e.r, family, v);
}

Cond1Report weak_cond1_value(const Grid& g, const CubeCoefficients& lambda,
                             const LeafMeasure& sigma, const LeafMeasure& mu,
                             const Exponents& e, double alpha,
                             const FractionalSet& E, const CubeFamily& family,
                             const CubeVector& v) {
  require(1.0 < alpha && alpha < e.q, Errc::invalid_input,
          "the weak conditions need 1 < alpha < q");
  const LeafMeasure mu_e = restrict_measure(mu, E);
  require(mu_e.total() > 0.0, Errc::empty_set,
          "the weak conditions need a set of positive mu-mass");
  const double r_alpha = 1.0 / (1.0 / alpha - 1.0 / e.p);
  Cond1Report report = cond1_core(g, lambda, sigma, mu_e, e.p_conj,
                                  1.0 / e.q_conj, e.s_conj, r_alpha, family, v);
  const double scale =
      std::pow(mu_e.total(), (e.q - alpha) / (e.q * alpha));
  if (!report.degenerate) report.value /= scale;
  return report;
}

double cond2_value(const Grid& g, const CubeCoefficients& lambda,
                   const LeafMeasure& sigma, const LeafMeasure& mu,
                   const Exponents& e, const CubeFamily& family,
                   const CubeMap& beta, bool use_tf_sigma) {
  validate_coefficients(g, lambda);
  validate_family(g, family);
  const double norm = beta_norm(beta, e.p);
  const CubeVector v =
      cond2_vector(g, lambda, sigma, family, beta, e.p, use_tf_sigma);
  return mixed_norm(g, v, e, mu) / norm;
}

double weak_cond2_value(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        const Exponents& e, double alpha,
                        const FractionalSet& E, const CubeFamily& family,
                        const CubeMap& beta, bool alt_reading,
                        bool use_tf_sigma) {
  require(1.0 < alpha && alpha < e.q, Errc::invalid_input,
          "the weak conditions need 1 < alpha < q");
  validate_coefficients(g, lambda);
  validate_family(g, family);
  const LeafMeasure mu_e = restrict_measure(mu, E);
  require(mu_e.total() > 0.0, Errc::empty_set,
          "the weak conditions need a set of positive mu-mass");
  const double norm = beta_norm(beta, e.p);
  const CubeVector v =
      cond2_vector(g, lambda, sigma, family, beta, e.p, use_tf_sigma);
  const double lhs = alt_reading ? mixed_norm(g, v, e.s, alpha, mu_e)
                                 : mixed_norm(g, v, alpha, e.q, mu_e);
  const double scale = std::pow(mu_e.total(), (e.q - alpha) / (e.q * alpha));
  return lhs / (norm * scale);
}

ConditionReport cond2_constant(const Grid& g, const CubeCoefficients& lambda,
                               const LeafMeasure& sigma, const LeafMeasure& mu,
                               const Exponents& e, const CubeFamily& family,
                               const AscentConfig& config, bool use_tf_sigma) {
  validate_coefficients(g, lambda);
  validate_family(g, family);

  // Cubes of zero sigma-mass cannot carry weight.
  std::vector<CubeId> cubes;
  for (CubeId F : family.cubes)
    if (sigma.cube_mass(F) > 0.0) cubes.push_back(F);

  ConditionReport report;
  if (cubes.empty()) return report;

  const int k = static_cast<int>(cubes.size());
  auto value_at = [&](const std::vector<double>& b) {
    CubeMap beta;
    for (int i = 0; i < k; ++i)
      if (b[i] > 0.0) beta.emplace(cubes[i], b[i]);
    if (beta.empty()) return 0.0;
    return cond2_value(g, lambda, sigma, mu, e, family, beta, use_tf_sigma);
  };

  if (k == 1) {
    report.value = value_at({1.0});
    report.method = Method::closed_form;
    report.beta.emplace(cubes[0], 1.0);
    return report;
  }

  // Coupling matrix: component at Q of the weighted test-function sum.
  std::vector<CubeId> rows;
  for (const auto& [Q, lam] : lambda.values)
    if (lam > 0.0) rows.push_back(Q);
  std::vector<std::vector<double>> M(rows.size(), std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CubeId Q = rows[i];
    const double lam = lambda.at(Q);
    for (int j = 0; j < k; ++j) {
      const CubeId F = cubes[j];
      double cross;
      if (use_tf_sigma)
        cross = g.contains(F, Q) ? sigma.cube_mass(Q) : 0.0;
      else if (g.contains(Q, F))
        cross = sigma.cube_mass(F);
      else if (g.contains(F, Q))
        cross = sigma.cube_mass(Q);
      else
        cross = 0.0;
      if (cross > 0.0)
        M[i][j] = lam * cross / std::pow(sigma.cube_mass(F), 1.0 / e.p);
    }
  }

  double best = 0.0;
  std::vector<double> best_beta(k, 0.0);
  auto run_start = [&](std::vector<double> b) {
    ConvergenceTracker tracker(config);
    for (;;) {
      const double norm = vector_lp(b, e.p);
      if (norm <= 0.0) break;
      for (double& x : b) x /= norm;

      CubeVector v;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double total = 0.0;
        for (int j = 0; j < k; ++j) total += M[i][j] * b[j];
        if (total > 0.0) v.values.emplace(rows[i], total);
      }
      const MixedNormGradient grad = gradient_of_mixed_norm(g, v, e.s, e.q, mu);
      if (grad.value > best) {
        best = grad.value;
        best_beta = b;
      }
      if (grad.value <= 0.0 || tracker.update(grad.value)) break;

      std::vector<double> next(k, 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        auto it = grad.dv.find(rows[i]);
        if (it == grad.dv.end()) continue;
        for (int j = 0; j < k; ++j) next[j] += M[i][j] * it->second;
      }
      double top = 0.0;
      for (double x : next) top = std::max(top, x);
      if (top <= 0.0) break;
      for (double& x : next) x = std::pow(x / top, 1.0 / (e.p - 1.0));
      b = std::move(next);
    }
  };

  run_start(std::vector<double>(k, 1.0));
  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 engine = restart_engine(config, restart);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> b(k);
    for (double& x : b) x = expo(engine) + 1e-6;
    run_start(std::move(b));
  }

  report.value = best;
  report.method = Method::ascent;
  for (int i = 0; i < k; ++i)
    if (best_beta[i] > 0.0) report.beta.emplace(cubes[i], best_beta[i]);

  if (k <= 4) {
    auto from_weights = [&](const std::vector<double>& w) {
      std::vector<double> b(k);
      for (int i = 0; i < k; ++i) b[i] = std::pow(w[i], 1.0 / e.p);
      return value_at(b);
    };
    auto [grid_best, grid_w] = maximize_on_simplex(k, 24, from_weights);
    if (grid_best > report.value * (1.0 + 1e-12)) {
      report.value = grid_best;
      report.method = Method::search;
      report.beta.clear();
      for (int i = 0; i < k; ++i)
        if (grid_w[i] > 0.0)
          report.beta.emplace(cubes[i], std::pow(grid_w[i], 1.0 / e.p));
    }
  }
  return report;
}

namespace {

// Data shared by the reduction-condition evaluator and maximizer.
struct ReductionTerms {
  std::vector<CubeId> cubes;     // active cubes
  std::vector<double> factor;    // (lambda sigma(Q))^q mu(Q)^{q/s} / sigma(Q)
  double mass_exponent = 0.0;    // 1 - q/s, the exponent on mu(E_Q)
};

ReductionTerms reduction_terms(const Grid&, const CubeCoefficients& lambda,
                               const LeafMeasure& sigma, const LeafMeasure& mu,
                               const Exponents& e) {
  ReductionTerms terms;
  const double mq_exp = e.s_infinite() ? 0.0 : e.q / e.s;
  terms.mass_exponent = 1.0 - mq_exp;
  for (const auto& [Q, lam] : lambda.values) {
    const double sq = sigma.cube_mass(Q);
    if (lam * sq == 0.0) continue;
    const double base =
        std::pow(lam * sq, e.q) * powz(mu.cube_mass(Q), mq_exp) / sq;
    if (base == 0.0) continue;
    terms.cubes.push_back(Q);
    terms.factor.push_back(base);
  }
  return terms;
}

double reduction_value_from_masses(const Grid& g, const ReductionTerms& terms,
                                   const std::vector<double>& piece_mass,
                                   const Exponents& e,
                                   const LeafMeasure& sigma) {
  CubeMap contributions;
  for (std::size_t i = 0; i < terms.cubes.size(); ++i) {
    const double value =
        terms.factor[i] * powz(piece_mass[i], terms.mass_exponent);
    if (value > 0.0) contributions[terms.cubes[i]] += value;
  }
  return lp_norm(LeafFunction(ancestor_sums(g, contributions)),
                 e.p_tilde_conj, sigma);
}

}  // namespace

double reduction_condition_value(const Grid& g, const CubeCoefficients& lambda,
                                 const LeafMeasure& sigma,
                                 const LeafMeasure& mu, const Exponents& e,
                                 const DisjointAllocation& sets) {
  validate_coefficients(g, lambda);
  validate_allocation(g, sets, 1e-9);
  const ReductionTerms terms = reduction_terms(g, lambda, sigma, mu, e);
  std::vector<double> piece_mass(terms.cubes.size(), 0.0);
  for (std::size_t i = 0; i < terms.cubes.size(); ++i) {
    auto it = sets.sets.find(terms.cubes[i]);
    if (it != sets.sets.end()) piece_mass[i] = mu.set_mass(it->second);
  }
  return reduction_value_from_masses(g, terms, piece_mass, e, sigma);
}

ConditionReport reduction_condition_sup(const Grid& g,
                                        const CubeCoefficients& lambda,
                                        const LeafMeasure& sigma,
                                        const LeafMeasure& mu,
                                        const Exponents& e,
                                        const AscentConfig& config) {
  validate_coefficients(g, lambda);
  const ReductionTerms terms = reduction_terms(g, lambda, sigma, mu, e);

  ConditionReport report;
  if (terms.cubes.empty()) return report;

  if (terms.mass_exponent == 0.0) {
    // s = q: the value does not depend on the allocation.
    report.value = reduction_value_from_masses(
        g, terms, std::vector<double>(terms.cubes.size(), 0.0), e, sigma);
    report.method = Method::closed_form;
    return report;
  }

  // Active leaves: positive mu-mass, below at least one active cube.
  struct ActiveLeaf {
    std::uint64_t leaf;
    double mass;
    std::vector<int> cubes;
  };
  std::vector<ActiveLeaf> leaves;
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf) {
    if (mu.leaf_mass(leaf) == 0.0) continue;
    ActiveLeaf entry{leaf, mu.leaf_mass(leaf), {}};
    for (std::size_t i = 0; i < terms.cubes.size(); ++i)
      if (g.contains(terms.cubes[i], g.leaf_cube(leaf)))
        entry.cubes.push_back(static_cast<int>(i));
    if (!entry.cubes.empty()) leaves.push_back(std::move(entry));
  }
  if (leaves.empty()) return report;

  using Fractions = std::vector<std::vector<double>>;
  auto masses_of = [&](const Fractions& phi) {
    std::vector<double> m(terms.cubes.size(), 0.0);
    for (std::size_t i = 0; i < leaves.size(); ++i)
      for (std::size_t j = 0; j < leaves[i].cubes.size(); ++j)
        m[leaves[i].cubes[j]] += phi[i][j] * leaves[i].mass;
    return m;
  };
  auto value_of = [&](const Fractions& phi) {
    return reduction_value_from_masses(g, terms, masses_of(phi), e, sigma);
  };

  double best = -1.0;
  Fractions best_phi;

  auto run_start = [&](Fractions phi) {
    for (auto& row : phi) {
      double total = 0.0;
      for (double x : row) total += x;
      for (double& x : row) x /= total;
    }
    double eta = 0.5;
    double current = value_of(phi);
    if (current > best) {
      best = current;
      best_phi = phi;
    }
    ConvergenceTracker tracker(config);
    for (;;) {
      if (tracker.update(current)) break;
      const std::vector<double> m = masses_of(phi);
      // dV/dm_i, up to the positive factor V^{1 - (p/q)'}
      CubeMap contributions;
      for (std::size_t i = 0; i < terms.cubes.size(); ++i) {
        const double value =
            terms.factor[i] * powz(m[i], terms.mass_exponent);
        if (value > 0.0) contributions[terms.cubes[i]] += value;
      }
      const LeafFunction dens(ancestor_sums(g, contributions));
      std::vector<double> weighted(g.leaf_count(), 0.0);
      for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
        if (sigma.leaf_mass(leaf) > 0.0 && dens[leaf] > 0.0)
          weighted[leaf] = sigma.leaf_mass(leaf) *
                           std::pow(dens[leaf], e.p_tilde_conj - 1.0);
      const std::vector<double> U = subtree_sums(g, weighted);
      std::vector<double> dm(terms.cubes.size(), 0.0);
      for (std::size_t i = 0; i < terms.cubes.size(); ++i) {
        if (m[i] <= 0.0) continue;
        dm[i] = terms.mass_exponent * terms.factor[i] *
                std::pow(m[i], terms.mass_exponent - 1.0) *
                U[g.cube_key(terms.cubes[i])];
      }
      double top = 0.0;
      for (const ActiveLeaf& leaf : leaves)
        for (int cube : leaf.cubes) top = std::max(top, leaf.mass * dm[cube]);
      if (top <= 0.0) break;

      bool moved = false;
      while (eta > 1e-7) {
        Fractions trial = phi;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
          double total = 0.0;
          for (std::size_t j = 0; j < leaves[i].cubes.size(); ++j) {
            trial[i][j] =
                phi[i][j] *
                std::exp(eta * leaves[i].mass * dm[leaves[i].cubes[j]] / top);
            total += trial[i][j];
          }
          for (double& x : trial[i]) x /= total;
        }
        const double trial_value = value_of(trial);
        if (trial_value >= current * (1.0 - 1e-14)) {
          phi = std::move(trial);
          current = trial_value;
          eta = std::min(eta * 1.25, 8.0);
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (current > best) {
        best = current;
        best_phi = phi;
      }
      if (!moved) break;
    }
  };

  // Uniform start, a start biased toward the pointwise-largest factor, then
  // random starts.
  {
    Fractions uniform(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i)
      uniform[i].assign(leaves[i].cubes.size(), 1.0);
    run_start(uniform);

    Fractions biased(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      biased[i].assign(leaves[i].cubes.size(), 0.05);
      int top_index = 0;
      for (std::size_t j = 1; j < leaves[i].cubes.size(); ++j)
        if (terms.factor[leaves[i].cubes[j]] >
            terms.factor[leaves[i].cubes[top_index]])
          top_index = static_cast<int>(j);
      biased[i][top_index] = 1.0;
    }
    run_start(biased);
  }
  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 engine = restart_engine(config, restart);
    std::exponential_distribution<double> expo(1.0);
    Fractions phi(leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      phi[i].resize(leaves[i].cubes.size());
      for (double& x : phi[i]) x = expo(engine) + 1e-3;
    }
    run_start(std::move(phi));
  }

  report.value = best;
  report.method = Method::ascent;

  // Discretized exhaustive cross-check on small instances.
  if (leaves.size() <= 8) {
    int units = 16;
    auto states = [&](int u) {
      double total = 1.0;
      for (const ActiveLeaf& leaf : leaves) {
        total *= simplex_grid_size(u, static_cast<int>(leaf.cubes.size()));
        if (total > 1e18) break;
      }
      return total;
    };
    while (units > 1 && states(units) > 2e6) --units;
    if (states(units) <= 2e6) {
      std::vector<std::vector<std::vector<int>>> splits(leaves.size());
      for (std::size_t i = 0; i < leaves.size(); ++i)
        simplex_grid(units, static_cast<int>(leaves[i].cubes.size()),
                     splits[i]);
      std::vector<double> m(terms.cubes.size(), 0.0);
      Fractions phi(leaves.size());
      double search_best = -1.0;
      Fractions search_phi;
      auto dfs = [&](auto&& self, std::size_t index) -> void {
        if (index == leaves.size()) {
          const double value =
              reduction_value_from_masses(g, terms, m, e, sigma);
          if (value > search_best) {
            search_best = value;
            search_phi = phi;
          }
          return;
        }
        const ActiveLeaf& leaf = leaves[index];
        for (const std::vector<int>& split : splits[index]) {
          phi[index].assign(split.size(), 0.0);
          for (std::size_t j = 0; j < split.size(); ++j) {
            phi[index][j] = static_cast<double>(split[j]) / units;
            m[leaf.cubes[j]] += phi[index][j] * leaf.mass;
          }
          self(self, index + 1);
          for (std::size_t j = 0; j < split.size(); ++j)
            m[leaf.cubes[j]] -= phi[index][j] * leaf.mass;
        }
      };
      dfs(dfs, 0);
      if (search_best > report.value * (1.0 + 1e-12)) {
        report.value = search_best;
        report.method = Method::search;
        best_phi = search_phi;
      }
    }
  }

  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = 0; j < best_phi[i].size(); ++j)
      if (best_phi[i][j] > 0.0)
        report.sets.sets[terms.cubes[leaves[i].cubes[j]]].set(
            leaves[i].leaf, best_phi[i][j]);
  return report;
}

DualityReport a1_a2_witness(const Grid& g, const CubeCoefficients& Lambda,
                            const LeafMeasure& mu, double s) {
  validate_coefficients(g, Lambda);
  require(1.0 < s && s != infinity, Errc::invalid_input,
          "the duality witness needs 1 < s < infinity");
  const double s_conj = s / (s - 1.0);

  CubeMap powered;
  for (const auto& [Q, v] : Lambda.values)
    if (v > 0.0) powered.emplace(Q, std::pow(v, s));
  const std::vector<double> chain = ancestor_sums(g, powered);

  DualityReport report;
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    report.a1 += mu.leaf_mass(leaf) * std::pow(chain[leaf], 1.0 / s);
  if (report.a1 == 0.0) return report;

  std::vector<double> weight(g.leaf_count(), 0.0);
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    if (mu.leaf_mass(leaf) > 0.0 && chain[leaf] > 0.0)
      weight[leaf] = mu.leaf_mass(leaf) * std::pow(chain[leaf], -1.0 / s_conj);
  const std::vector<double> weight_sums = subtree_sums(g, weight);

  for (const auto& [Q, v] : Lambda.values) {
    if (v <= 0.0) continue;
    const double alpha =
        std::pow(v, s - 1.0) * weight_sums[g.cube_key(Q)];
    if (alpha <= 0.0) continue;
    report.alpha_star.emplace(Q, alpha);
    report.numerator += v * alpha;
  }

  CubeMap tau;
  for (const auto& [Q, alpha] : report.alpha_star) {
    const double mass = mu.cube_mass(Q);
    tau.emplace(Q, std::pow(alpha / mass, s_conj) * mass);
  }
  const std::vector<double> tau_sums = cube_tree_sums(g, tau);
  for (int level = 0; level <= g.depth(); ++level) {
    for (std::uint64_t pos = 0; pos < g.level_size(level); ++pos) {
      const CubeId P{level, pos};
      const double mass = mu.cube_mass(P);
      if (mass <= 0.0) continue;
      report.denominator =
          std::max(report.denominator,
                   std::pow(tau_sums[g.cube_key(P)] / mass, 1.0 / s_conj));
    }
  }
  if (report.denominator > 0.0)
    report.ratio = report.numerator / report.denominator;
  return report;
}

double dorverbitsky_value(const Grid& g, const CubeCoefficients& b,
                          const LeafMeasure& mu, double q, double s,
                          const DisjointAllocation& sets) {
  validate_coefficients(g, b);
  validate_allocation(g, sets, 1e-9);
  require(q > 0.0 && std::isfinite(q), Errc::invalid_input,
          "the aggregation exponent q must be positive and finite");
  require(s >= q, Errc::invalid_input, "the exponents must satisfy q <= s");
  const double mq_exp = s == infinity ? 0.0 : q / s;
  const double me_exp = 1.0 - mq_exp;
  double total = 0.0;
  for (const auto& [Q, value] : b.values) {
    if (value <= 0.0) continue;
    double piece = 0.0;
    if (auto it = sets.sets.find(Q); it != sets.sets.end())
      piece = mu.set_mass(it->second);
    total += std::pow(value, q) * powz(piece, me_exp) *
             powz(mu.cube_mass(Q), mq_exp);
  }
  return std::pow(total, 1.0 / q);
}

ConditionReport operator_norm(const Grid& g, const CubeCoefficients& lambda,
                              const LeafMeasure& sigma, const LeafMeasure& mu,
                              const Exponents& e, const AscentConfig& config) {
  validate_coefficients(g, lambda);
  require(sigma.total() > 0.0, Errc::zero_measure,
          "the operator norm needs a source measure of positive mass");

  ConditionReport report;
  report.function = LeafFunction(g, 0.0);
  bool trivial = mu.total() == 0.0;
  if (!trivial) {
    trivial = true;
    for (const auto& [Q, v] : lambda.values)
      if (v > 0.0) trivial = false;
  }
  if (trivial) return report;

  auto normalize = [&](LeafFunction& f) {
    double total = 0.0;
    for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
      total += std::pow(f[leaf], e.p) * sigma.leaf_mass(leaf);
    if (total <= 0.0) return false;
    const double scale = std::pow(total, -1.0 / e.p);
    for (double& x : f.values) x *= scale;
    return true;
  };

  double best = 0.0;
  auto run_start = [&](LeafFunction f) {
    for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
      if (sigma.leaf_mass(leaf) == 0.0) f.values[leaf] = 0.0;
    if (!normalize(f)) return;
    ConvergenceTracker tracker(config);
    for (;;) {
      std::vector<double> weighted(g.leaf_count());
      for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
        weighted[leaf] = f[leaf] * sigma.leaf_mass(leaf);
      const std::vector<double> integral = subtree_sums(g, weighted);
      CubeVector v;
      for (const auto& [Q, lam] : lambda.values) {
        if (lam == 0.0) continue;
        const double value = lam * integral[g.cube_key(Q)];
        if (value > 0.0) v.values.emplace(Q, value);
      }
      const MixedNormGradient grad = gradient_of_mixed_norm(g, v, e.s, e.q, mu);
      if (grad.value > best) {
        best = grad.value;
        report.function = f;
      }
      if (grad.value <= 0.0 || tracker.update(grad.value)) break;

      CubeMap pull;
      for (const auto& [Q, dv] : grad.dv) {
        const double lam = lambda.at(Q);
        if (lam > 0.0) pull.emplace(Q, lam * dv);
      }
      const std::vector<double> direction = ancestor_sums(g, pull);
      LeafFunction next(g, 0.0);
      double top = 0.0;
      for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
        if (sigma.leaf_mass(leaf) > 0.0)
          top = std::max(top, direction[leaf]);
      if (top <= 0.0) break;
      for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
        if (sigma.leaf_mass(leaf) > 0.0 && direction[leaf] > 0.0)
          next.values[leaf] =
              std::pow(direction[leaf] / top, 1.0 / (e.p - 1.0));
      if (!normalize(next)) break;
      f = std::move(next);
    }
  };

  run_start(LeafFunction(g, 1.0));
  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 engine = restart_engine(config, restart);
    std::exponential_distribution<double> expo(1.0);
    LeafFunction f(g, 0.0);
    for (double& x : f.values) x = expo(engine) + 1e-6;
    run_start(std::move(f));
  }

  report.value = best;
  report.method = Method::ascent;
  return report;
}

double operator_norm_bruteforce(const Grid& g, const CubeCoefficients& lambda,
                                const LeafMeasure& sigma,
                                const LeafMeasure& mu, const Exponents& e,
                                int resolution) {
  validate_coefficients(g, lambda);
  require(sigma.total() > 0.0, Errc::zero_measure,
          "the operator norm needs a source measure of positive mass");

  std::vector<std::uint64_t> active;
  for (std::uint64_t leaf = 0; leaf < g.leaf_count(); ++leaf)
    if (sigma.leaf_mass(leaf) > 0.0) active.push_back(leaf);
  require(active.size() <= 64, Errc::too_large,
          "the grid search supports at most 64 active leaves");

  // w parametrizes the mass split of f^p dsigma over the active leaves.
  auto value_at = [&](const std::vector<double>& w) {
    LeafFunction f(g, 0.0);
    for (std::size_t i = 0; i < active.size(); ++i)
      f.values[active[i]] =
          std::pow(w[i] / sigma.leaf_mass(active[i]), 1.0 / e.p);
    return mixed_norm(g, apply_T(g, lambda, sigma, f), e, mu);
  };
  return maximize_on_simplex(static_cast<int>(active.size()), resolution,
                             value_at)
      .first;
}

}  // namespace dyadic
