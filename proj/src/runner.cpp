#include "dyadic/runner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

const Exponents& require_exponents(const Instance& instance) {
  require(instance.exponents.has_value(), Errc::invalid_input,
          "instance has no exponents block");
  return *instance.exponents;
}

const LeafFunction& require_f(const Instance& instance) {
  require(instance.f.has_value(), Errc::invalid_input, "instance has no function f");
  return *instance.f;
}

const CubeVector& require_g(const Instance& instance) {
  require(instance.g.has_value(), Errc::invalid_input, "instance has no vector g");
  return *instance.g;
}

const CubeFamily* find_family(const Instance& instance, const std::string& name) {
  auto it = instance.families.find(name);
  return it == instance.families.end() ? nullptr : &it->second;
}

std::string cube_label(const Grid& g, CubeId q) {
  std::ostringstream out;
  out << q.level;
  const char* sep = ":";
  for (std::uint64_t c : g.coordinates(q)) {
    out << sep << c;
    sep = ";";
  }
  return out.str();
}

Json leaf_values_json(const LeafFunction& h) {
  Json out = Json::array();
  for (double v : h.values) out.push_back(v);
  return out;
}

std::string leaf_csv(const LeafFunction& h, const char* header) {
  std::ostringstream out;
  out << "leaf," << header << "\n";
  for (std::size_t leaf = 0; leaf < h.values.size(); ++leaf) {
    out << leaf << "," << Json(h.values[leaf]).dump() << "\n";
  }
  return out.str();
}

std::string cube_csv(const Grid& g, const CubeMap& values, const char* header) {
  std::ostringstream out;
  out << "cube," << header << "\n";
  for (const auto& [q, v] : values) {
    out << cube_label(g, q) << "," << Json(v).dump() << "\n";
  }
  return out.str();
}

struct GateSet {
  Json gates = Json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, Json details = Json::object()) {
    details["name"] = name;
    details["pass"] = pass;
    gates.push_back(std::move(details));
    all_pass = all_pass && pass;
  }
};

CubeVector scale_vector(const CubeVector& v, double t) {
  CubeVector out = v;
  for (auto& [q, value] : out.values) value *= t;
  return out;
}

CubeCoefficients scale_coefficients(const CubeCoefficients& lambda, double t) {
  CubeCoefficients out = lambda;
  for (auto& [q, value] : out.values) value *= t;
  return out;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

RationalLeafMeasure exact_measure(const Instance& instance, bool mu) {
  return RationalLeafMeasure(instance.grid, mu ? instance.exact.mu : instance.exact.sigma,
                             mu ? "mu" : "sigma");
}

Json run_eval_impl(const Instance& instance, const std::string& what,
                   const RunOptions& options) {
  const Grid& grid = instance.grid;
  Json report;
  report["what"] = what;

  if (what == "norm") {
    const Exponents& e = require_exponents(instance);
    AscentConfig config;
    config.seed = options.seed;
    ConditionReport result = operator_norm(grid, instance.lambda, instance.sigma,
                                           instance.mu, e, config);
    report["value"] = result.value;
    report["method"] = method_name(result.method);
    report["maximizer"] = leaf_values_json(result.function);
    if (options.want_csv) report["csv"] = leaf_csv(result.function, "maximizer");
    return report;
  }

  if (what == "T") {
    CubeVector v = apply_T(grid, instance.lambda, instance.sigma, require_f(instance));
    Json components = Json::array();
    for (const auto& [q, value] : v.values) {
      Json entry = cube_to_json(grid, q);
      entry["value"] = value;
      components.push_back(std::move(entry));
    }
    report["components"] = std::move(components);
    if (options.want_csv) report["csv"] = cube_csv(grid, v.values, "value");
    return report;
  }

  if (what == "Tstar") {
    LeafFunction h = apply_T_star(grid, instance.lambda, instance.mu, require_g(instance));
    report["values"] = leaf_values_json(h);
    if (options.want_csv) report["csv"] = leaf_csv(h, "value");
    return report;
  }

  if (what == "mixed") {
    const Exponents& e = require_exponents(instance);
    CubeVector v;
    if (instance.g) {
      v = *instance.g;
      report["source"] = "g";
    } else {
      v = apply_T(grid, instance.lambda, instance.sigma, require_f(instance));
      report["source"] = "Tf";
    }
    report["value"] = mixed_norm(grid, v, e, instance.mu);
    return report;
  }

  if (what == "weak") {
    const Exponents& e = require_exponents(instance);
    CubeVector v = apply_T(grid, instance.lambda, instance.sigma, require_f(instance));
    LeafFunction h = ls_aggregate(grid, v, e.s);
    report["value"] = weak_norm(h, e.q, instance.mu);
    report["aggregate"] = leaf_values_json(h);
    if (options.want_csv) report["csv"] = leaf_csv(h, "aggregate");
    return report;
  }

  if (what == "wolff") {
    require(instance.wolff.has_value(), Errc::invalid_input, "instance has no wolff block");
    LeafFunction h = wolff_dyadic(grid, require_f(instance), *instance.wolff);
    report["values"] = leaf_values_json(h);
    report["params"] = Json{{"alpha", instance.wolff->alpha}, {"s", instance.wolff->s}};
    if (options.want_csv) report["csv"] = leaf_csv(h, "potential");
    return report;
  }

  fail(Errc::invalid_input, "unknown eval target: " + what);
}

// thm12: operator norm against the reduction condition, plus exact
// homogeneity checks of both sides.
RunResult check_thm12(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  const Exponents& e = require_exponents(instance);
  AscentConfig config;
  config.seed = options.seed;

  ConditionReport norm = operator_norm(grid, instance.lambda, instance.sigma,
                                       instance.mu, e, config);
  ConditionReport reduction = reduction_condition_sup(grid, instance.lambda,
                                                      instance.sigma, instance.mu,
                                                      e, config);

  GateSet gates;
  Json report;
  report["what"] = "thm12";
  report["norm"] = norm.value;
  report["norm_method"] = method_name(norm.method);
  report["reduction"] = reduction.value;
  report["reduction_method"] = method_name(reduction.method);

  bool norm_zero = norm.value == 0.0;
  bool reduction_zero = reduction.value == 0.0;
  gates.add("zero_consistency", norm_zero == reduction_zero,
            Json{{"norm", norm.value}, {"reduction", reduction.value}});

  if (norm_zero && reduction_zero) {
    gates.add("equivalence_band", true, Json{{"ratio", nullptr}});
    report["ratio"] = nullptr;
  } else {
    double rhs = std::pow(reduction.value, 1.0 / e.q);
    double ratio = rhs > 0 ? norm.value / rhs : infinity;
    report["ratio"] = ratio;
    gates.add("equivalence_band", ratio >= 1.0 / 32.0 && ratio <= 32.0,
              Json{{"ratio", ratio}, {"band", Json::array({1.0 / 32.0, 32.0})}});
  }

  const double t = 3.0;
  double mixed_scaled = 0.0, mixed_base = 0.0;
  if (instance.sigma.total() > 0) {
    CubeVector v = apply_T(grid, instance.lambda, instance.sigma, LeafFunction(grid, 1.0));
    mixed_base = mixed_norm(grid, v, e, instance.mu);
    mixed_scaled = mixed_norm(grid, scale_vector(v, t), e, instance.mu);
  }
  bool hom_mixed = rel_close(mixed_scaled, t * mixed_base, 1e-10);

  DisjointAllocation empty;
  double red_base = reduction_condition_value(grid, instance.lambda, instance.sigma,
                                              instance.mu, e, empty);
  double red_scaled = reduction_condition_value(grid, scale_coefficients(instance.lambda, t),
                                                instance.sigma, instance.mu, e, empty);
  bool hom_reduction = rel_close(red_scaled, std::pow(t, e.q) * red_base, 1e-10);
  gates.add("homogeneity", hom_mixed && hom_reduction,
            Json{{"mixed_norm", hom_mixed}, {"reduction", hom_reduction}});

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

// thm11: the two testing conditions against the operator norm, with the
// 16x necessity margin enforced on sparse certificates.
RunResult check_thm11(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  const Exponents& e = require_exponents(instance);
  AscentConfig config;
  config.seed = options.seed;

  ConditionReport norm = operator_norm(grid, instance.lambda, instance.sigma,
                                       instance.mu, e, config);

  GateSet gates;
  Json report;
  report["what"] = "thm11";
  report["norm"] = norm.value;

  const CubeFamily* G = find_family(instance, "G");
  if (G != nullptr && instance.g) {
    Cond1Report r1 = cond1_value(grid, instance.lambda, instance.sigma, instance.mu,
                                 e, *G, *instance.g);
    report["cond1"] = Json{{"value", r1.value},
                           {"degenerate", r1.degenerate},
                           {"family_sparse", r1.family_sparse},
                           {"skipped_components", r1.skipped_components},
                           {"terms", r1.terms.size()}};
    bool enforced = r1.family_sparse;
    bool pass = !enforced || (!r1.degenerate && r1.value <= 16.0 * norm.value + 1e-12);
    gates.add("cond1_necessity", pass,
              Json{{"value", r1.value}, {"bound", 16.0 * norm.value}, {"enforced", enforced}});
  } else {
    report["cond1"] = nullptr;
  }

  const CubeFamily* F = find_family(instance, "F");
  if (F != nullptr) {
    ConditionReport r2 = cond2_constant(grid, instance.lambda, instance.sigma,
                                        instance.mu, e, *F, config, options.variant);
    bool family_sparse = family_carleson_check(grid, *F, instance.sigma, 2.0).ok;
    report["cond2"] = Json{{"value", r2.value},
                           {"method", method_name(r2.method)},
                           {"family_sparse", family_sparse}};
    bool pass = !family_sparse || r2.value <= 16.0 * norm.value + 1e-12;
    gates.add("cond2_necessity", pass,
              Json{{"value", r2.value}, {"bound", 16.0 * norm.value}, {"enforced", family_sparse}});

    if (instance.beta) {
      double fixed = cond2_value(grid, instance.lambda, instance.sigma, instance.mu,
                                 e, *F, *instance.beta, options.variant);
      report["cond2_fixed_beta"] = fixed;
      gates.add("cond2_sup_dominates", r2.value >= fixed * (1.0 - 1e-9),
                Json{{"fixed", fixed}, {"sup", r2.value}});
    }
  } else {
    report["cond2"] = nullptr;
  }

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

template <class S>
Json sparse_side(const Grid& grid, const CubeFamily& family,
                 const BasicLeafMeasure<S>& m, GateSet& gates,
                 const std::string& label) {
  BasicSparsenessResult<S> direct = is_sigma_sparse<S>(grid, family, m, S{1} / S{2});
  BasicFamilyCheck<S> carleson = family_carleson_check<S>(grid, family, m, S{2});

  gates.add(label + "_agreement", direct.sparse == carleson.ok,
            Json{{"sparse", direct.sparse}, {"carleson_ok", carleson.ok}});

  if (direct.sparse) {
    bool witness_ok = true;
    try {
      validate_allocation(grid, direct.witness, std::is_same_v<S, double> ? 1e-12 : 0.0);
    } catch (const Error&) {
      witness_ok = false;
    }
    for (CubeId f : family.cubes) {
      auto it = direct.witness.sets.find(f);
      S got = it == direct.witness.sets.end() ? S{0} : m.set_mass(it->second);
      S want = m.cube_mass(f) / S{2};
      if constexpr (std::is_same_v<S, double>) {
        witness_ok = witness_ok && got >= want - 1e-12 * std::max(1.0, want);
      } else {
        witness_ok = witness_ok && got >= want;
      }
    }
    gates.add(label + "_witness", witness_ok, Json{{"cubes", family.size()}});
  }

  return Json{{"sparse", direct.sparse},
              {"carleson_ok", carleson.ok},
              {"worst_ratio", to_double(carleson.worst_ratio)}};
}

RunResult check_sparse(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  GateSet gates;
  Json families = Json::object();

  for (const auto& [name, family] : instance.families) {
    Json entry;
    if (options.exact) {
      RationalLeafMeasure sigma = exact_measure(instance, false);
      RationalLeafMeasure mu = exact_measure(instance, true);
      entry["sigma"] = sparse_side<Rational>(grid, family, sigma, gates, name + ".sigma");
      entry["mu"] = sparse_side<Rational>(grid, family, mu, gates, name + ".mu");
    } else {
      entry["sigma"] = sparse_side<double>(grid, family, instance.sigma, gates, name + ".sigma");
      entry["mu"] = sparse_side<double>(grid, family, instance.mu, gates, name + ".mu");
    }
    families[name] = std::move(entry);
  }

  Json report;
  report["what"] = "sparse";
  report["families"] = std::move(families);
  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

RunResult check_carleson(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  CarlesonReport rep = carleson_constant<double>(grid, instance.lambda.values, instance.mu);

  // Independent quadratic recomputation: for every cube P, sum the stored
  // coefficients of cubes inside P directly.
  bool naive_infinite = false;
  double naive_value = 0.0;
  for (std::uint64_t key = 0; key < grid.cube_count(); ++key) {
    CubeId P = grid.cube_at(key);
    double load = 0.0;
    for (const auto& [q, value] : instance.lambda.values) {
      if (grid.contains(P, q)) load += value;
    }
    double mass = instance.mu.cube_mass(P);
    if (mass > 0) {
      naive_value = std::max(naive_value, load / mass);
    } else if (load > 0) {
      naive_infinite = true;
    }
  }

  GateSet gates;
  bool agree = rep.infinite == naive_infinite &&
               (rep.infinite || rel_close(rep.value, naive_value, 1e-12));
  gates.add("oracle_agreement", agree,
            Json{{"value", rep.value}, {"naive", naive_value},
                 {"infinite", rep.infinite}, {"naive_infinite", naive_infinite}});

  Json report;
  report["what"] = "carleson";
  report["infinite"] = rep.infinite;
  report["value"] = rep.value;
  report["witness"] = cube_to_json(grid, rep.witness);

  if (options.exact) {
    auto exact = carleson_constant<Rational>(grid, instance.exact.lambda,
                                             exact_measure(instance, true));
    report["exact_value"] = rational_to_string(exact.value);
    bool matches = exact.infinite == rep.infinite &&
                   (exact.infinite || rel_close(to_double(exact.value), rep.value, 1e-12));
    gates.add("exact_agreement", matches, Json{{"exact", rational_to_string(exact.value)}});
  }

  if (options.want_csv) {
    std::ostringstream csv;
    csv << "cube,ratio\n";
    for (const auto& [q, ratio] : rep.ratios) {
      csv << cube_label(grid, q) << "," << Json(ratio).dump() << "\n";
    }
    report["csv"] = csv.str();
  }

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

template <class S>
void dor_gates(const Grid& grid, const BasicCubeMap<S>& lambda,
               const BasicLeafMeasure<S>& m, const S& C, bool atomic_mode,
               bool expect_infeasible, GateSet& gates, Json& report) {
  BasicAllocationOutcome<S> outcome = dor_allocate<S>(grid, lambda, m, C, atomic_mode);
  report["feasible"] = outcome.feasible;
  if (outcome.infeasible_at) {
    report["infeasible_at"] = cube_to_json(grid, *outcome.infeasible_at);
  }

  gates.add("expected_outcome", outcome.feasible == !expect_infeasible,
            Json{{"feasible", outcome.feasible}, {"expected_infeasible", expect_infeasible}});
  if (!outcome.feasible) return;

  bool valid = true;
  try {
    validate_allocation(grid, outcome.allocation, std::is_same_v<S, double> ? 1e-9 : 0.0);
  } catch (const Error&) {
    valid = false;
  }
  gates.add("allocation_disjoint", valid);

  bool targets_ok = true;
  Json masses = Json::array();
  for (const auto& [q, coefficient] : lambda) {
    auto it = outcome.allocation.sets.find(q);
    S got = it == outcome.allocation.sets.end() ? S{0} : m.set_mass(it->second);
    S want = coefficient / C;
    bool ok;
    if constexpr (std::is_same_v<S, double>) {
      ok = atomic_mode ? got >= want - 1e-9 * std::max(1.0, want)
                       : std::abs(got - want) <= 1e-9 * std::max(1.0, want);
    } else {
      ok = atomic_mode ? got >= want : got == want;
    }
    targets_ok = targets_ok && ok;
    Json entry = cube_to_json(grid, q);
    entry["target"] = to_double(want);
    entry["mass"] = to_double(got);
    masses.push_back(std::move(entry));
  }
  gates.add("mass_targets", targets_ok, Json{{"atomic", atomic_mode}});
  report["masses"] = std::move(masses);
}

RunResult check_dor(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  GateSet gates;
  Json report;
  report["what"] = "dor";

  if (options.exact) {
    RationalLeafMeasure mu = exact_measure(instance, true);
    Rational C;
    if (instance.carleson_c) {
      C = rational_from_double(*instance.carleson_c);
    } else {
      auto rep = carleson_constant<Rational>(grid, instance.exact.lambda, mu);
      require(!rep.infinite && rep.value > 0, Errc::invalid_input,
              "no finite positive allocation level available");
      C = rep.value;
    }
    report["level"] = to_double(C);
    dor_gates<Rational>(grid, instance.exact.lambda, mu, C, options.atomic_mode,
                        instance.expect_infeasible, gates, report);
  } else {
    double C;
    if (instance.carleson_c) {
      C = *instance.carleson_c;
    } else {
      auto rep = carleson_constant<double>(grid, instance.lambda.values, instance.mu);
      require(!rep.infinite && rep.value > 0, Errc::invalid_input,
              "no finite positive allocation level available");
      C = rep.value;
    }
    report["level"] = C;
    dor_gates<double>(grid, instance.lambda.values, instance.mu, C, options.atomic_mode,
                      instance.expect_infeasible, gates, report);
  }

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

RunResult check_lemma45(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  const Exponents& e = require_exponents(instance);
  require(!e.s_infinite() && e.s > 1, Errc::invalid_input,
          "the duality witness needs 1 < s < infinity");

  DualityReport rep = a1_a2_witness(grid, instance.lambda, instance.mu, e.s);

  GateSet gates;
  gates.add("ratio_dominates", rep.ratio >= rep.a1 - 1e-9,
            Json{{"ratio", rep.ratio}, {"a1", rep.a1}});
  gates.add("witness_normalized", rep.denominator <= 1.0 + 1e-9,
            Json{{"denominator", rep.denominator}});

  Json report;
  report["what"] = "lemma45";
  report["a1"] = rep.a1;
  report["numerator"] = rep.numerator;
  report["denominator"] = rep.denominator;
  report["ratio"] = rep.ratio;
  if (options.want_csv) report["csv"] = cube_csv(grid, rep.alpha_star, "alpha_star");
  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

RunResult check_lemma47(const Instance& instance, const RunOptions&) {
  const Grid& grid = instance.grid;
  const Exponents& e = require_exponents(instance);

  DisjointAllocation sets;
  if (auto it = instance.allocations.find("E"); it != instance.allocations.end()) {
    sets = it->second;
  }
  DisjointAllocation empty;
  double value = dorverbitsky_value(grid, instance.lambda, instance.mu, e.q, e.s, sets);
  double value_empty = dorverbitsky_value(grid, instance.lambda, instance.mu, e.q, e.s, empty);

  GateSet gates;
  Json report;
  report["what"] = "lemma47";
  report["value"] = value;
  report["value_empty"] = value_empty;

  if (!e.s_infinite() && e.s == e.q) {
    gates.add("allocation_independence", value == value_empty,
              Json{{"value", value}, {"value_empty", value_empty}});
  } else if (e.s_infinite()) {
    // Envelope allocation: each leaf goes to the largest coefficient over
    // its ancestors, so the quadratic sum collapses to the pointwise sup.
    DisjointAllocation envelope;
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      if (instance.mu.leaf_mass(leaf) <= 0) continue;
      CubeId best{};
      double best_value = 0.0;
      for (CubeId q : grid.ancestors(leaf)) {
        double b = instance.lambda.at(q);
        if (b > best_value) {
          best_value = b;
          best = q;
        }
      }
      if (best_value > 0) envelope.sets[best].set(leaf, 1.0);
    }
    double enveloped = dorverbitsky_value(grid, instance.lambda, instance.mu, e.q, e.s, envelope);
    double rhs = lp_norm(maximal_multiplier(grid, instance.lambda), e.q, instance.mu);
    gates.add("envelope_linearization", rel_close(enveloped, rhs, 1e-10),
              Json{{"enveloped", enveloped}, {"pointwise_sup", rhs}});
    report["enveloped"] = enveloped;
  } else {
    gates.add("monotone_in_allocation", value >= value_empty,
              Json{{"value", value}, {"value_empty", value_empty}});
  }

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

RunResult check_weak(const Instance& instance, const RunOptions& options) {
  const Grid& grid = instance.grid;
  const Exponents& e = require_exponents(instance);
  require(instance.alpha.has_value(), Errc::invalid_input, "instance has no alpha");
  double alpha = *instance.alpha;
  require(alpha > 1 && alpha < e.q, Errc::invalid_input,
          "alpha must lie strictly between 1 and q");

  CubeVector v = apply_T(grid, instance.lambda, instance.sigma, require_f(instance));
  LeafFunction h = ls_aggregate(grid, v, e.s);
  double norm = weak_norm(h, e.q, instance.mu);
  double quasi = std::pow(norm, 1.0 / e.q);
  double bound = std::pow(e.q / (e.q - alpha), 1.0 / alpha);

  std::set<double> levels;
  for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
    if (std::abs(h[leaf]) > 0) levels.insert(std::abs(h[leaf]));
  }
  std::vector<std::pair<std::string, FractionalSet>> candidates;
  int level_index = 0;
  for (double t : levels) {
    FractionalSet set;
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) {
      if (std::abs(h[leaf]) >= t) set.set(leaf, 1.0);
    }
    candidates.emplace_back("level_" + std::to_string(level_index++), std::move(set));
  }
  std::size_t level_sets = candidates.size();
  for (const auto& [name, set] : instance.sets) candidates.emplace_back(name, set);

  GateSet gates;
  double kol_max = 0.0;
  bool upper_ok = true;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& [name, set] = candidates[i];
    if (instance.mu.set_mass(set) <= 0) continue;
    double value = kolmogorov_value(h, e.q, alpha, instance.mu, set);
    if (i < level_sets) kol_max = std::max(kol_max, value);
    upper_ok = upper_ok && value <= bound * quasi * (1.0 + 1e-12);
  }
  gates.add("kolmogorov_lower", kol_max >= quasi * (1.0 - 1e-12),
            Json{{"max", kol_max}, {"weak_quasi_norm", quasi}});
  gates.add("kolmogorov_upper", upper_ok, Json{{"bound_factor", bound}});

  Json report;
  report["what"] = "weak";
  report["weak_norm"] = norm;
  report["weak_quasi_norm"] = quasi;
  report["kolmogorov_max"] = kol_max;
  report["bound_factor"] = bound;

  const FractionalSet* E = nullptr;
  if (auto it = instance.sets.find("E"); it != instance.sets.end()) E = &it->second;
  const CubeFamily* G = find_family(instance, "G");
  if (E != nullptr && G != nullptr && instance.g) {
    Cond1Report r1 = weak_cond1_value(grid, instance.lambda, instance.sigma, instance.mu,
                                      e, alpha, *E, *G, *instance.g);
    report["weak_cond1"] = Json{{"value", r1.value}, {"degenerate", r1.degenerate}};
  }
  const CubeFamily* F = find_family(instance, "F");
  if (E != nullptr && F != nullptr && instance.beta) {
    double r2 = weak_cond2_value(grid, instance.lambda, instance.sigma, instance.mu,
                                 e, alpha, *E, *F, *instance.beta, options.variant);
    report["weak_cond2"] = r2;
  }

  report["gates"] = std::move(gates.gates);
  report["pass"] = gates.all_pass;
  return {std::move(report), !gates.all_pass};
}

std::string gates_csv(const Json& report) {
  std::ostringstream out;
  out << "gate,pass\n";
  if (report.contains("gates")) {
    for (const Json& gate : report["gates"]) {
      out << gate["name"].get<std::string>() << "," << (gate["pass"].get<bool>() ? 1 : 0)
          << "\n";
    }
  }
  return out.str();
}

}  // namespace

RunResult run_eval(const Instance& instance, const std::string& what,
                   const RunOptions& options) {
  return {run_eval_impl(instance, what, options), false};
}

RunResult run_check(const Instance& instance, const std::string& what,
                    const RunOptions& options) {
  RunResult result;
  if (what == "thm12") {
    result = check_thm12(instance, options);
  } else if (what == "thm11") {
    result = check_thm11(instance, options);
  } else if (what == "sparse") {
    result = check_sparse(instance, options);
  } else if (what == "carleson") {
    result = check_carleson(instance, options);
  } else if (what == "dor") {
    result = check_dor(instance, options);
  } else if (what == "lemma45") {
    result = check_lemma45(instance, options);
  } else if (what == "lemma47") {
    result = check_lemma47(instance, options);
  } else if (what == "weak") {
    result = check_weak(instance, options);
  } else {
    fail(Errc::invalid_input, "unknown check target: " + what);
  }
  if (options.want_csv && !result.report.contains("csv")) {
    result.report["csv"] = gates_csv(result.report);
  }
  return result;
}

}  // namespace dyadic
