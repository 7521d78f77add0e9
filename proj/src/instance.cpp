#include "dyadic/instance.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  fail(Errc::schema_violation, path + ": " + what);
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(path + "." + key, "missing required field");
  return *it;
}

const Json* optional_member(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

void reject_unknown_keys(const Json& j, const std::string& path,
                         std::initializer_list<const char*> known) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : known) ok = ok || it.key() == key;
    if (!ok) schema_fail(path, "unknown field '" + it.key() + "'");
  }
}

long long get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_fail(path, "expected an integer");
  return j.get<long long>();
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_fail(path, "expected a number");
  return j.get<double>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) schema_fail(path, "expected a boolean");
  return j.get<bool>();
}

struct ScalarValue {
  double value = 0.0;
  Rational exact;
};

// Numeric literals may be JSON numbers or strings such as "1/3" or "0.25";
// string literals are parsed exactly.
ScalarValue get_scalar(const Json& j, const std::string& path) {
  if (j.is_number_integer()) {
    long long v = j.get<long long>();
    return {static_cast<double>(v), Rational(v)};
  }
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) schema_fail(path, "expected a finite number");
    return {v, rational_from_double(v)};
  }
  if (j.is_string()) {
    try {
      Rational r = parse_rational(j.get<std::string>());
      return {to_double(r), r};
    } catch (const Error& e) {
      schema_fail(path, e.what());
    }
  }
  schema_fail(path, "expected a number or a numeric string");
}

std::vector<ScalarValue> get_scalar_array(const Json& j, const std::string& path,
                                          std::size_t expected) {
  if (!j.is_array()) schema_fail(path, "expected an array");
  if (j.size() != expected) {
    schema_fail(path, "expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(j.size()));
  }
  std::vector<ScalarValue> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_scalar(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::uint64_t get_leaf_index(const std::string& key, const Grid& g, const std::string& path) {
  std::uint64_t value = 0;
  try {
    std::size_t consumed = 0;
    value = std::stoull(key, &consumed);
    if (consumed != key.size()) throw std::invalid_argument(key);
  } catch (const std::exception&) {
    schema_fail(path, "key '" + key + "' is not a leaf index");
  }
  if (value >= g.leaf_count()) schema_fail(path, "leaf index " + key + " out of range");
  return value;
}

FractionalSet get_fractional_set(const Json& j, const Grid& g, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object of leaf fractions");
  FractionalSet set;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::uint64_t leaf = get_leaf_index(it.key(), g, path);
    double frac = get_scalar(*it, path + "." + it.key()).value;
    if (!(frac >= 0.0 && frac <= 1.0)) schema_fail(path + "." + it.key(), "fraction outside [0, 1]");
    set.set(leaf, frac);
  }
  return set;
}

double get_exponent_value(const Json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return infinity;
    schema_fail(path, "expected a number or \"inf\"");
  }
  return get_double(j, path);
}

}  // namespace

Json cube_to_json(const Grid& g, CubeId q) {
  Json index = Json::array();
  for (std::uint64_t c : g.coordinates(q)) index.push_back(c);
  return Json{{"level", q.level}, {"index", std::move(index)}};
}

CubeId cube_from_json(const Grid& g, const Json& j, const std::string& path) {
  reject_unknown_keys(j, path, {"level", "index"});
  long long level = get_integer(member(j, path, "level"), path + ".level");
  const Json& index = member(j, path, "index");
  if (!index.is_array() || static_cast<int>(index.size()) != g.dimension()) {
    schema_fail(path + ".index", "expected " + std::to_string(g.dimension()) + " coordinates");
  }
  std::vector<std::uint64_t> coords;
  for (std::size_t d = 0; d < index.size(); ++d) {
    long long c = get_integer(index[d], path + ".index[" + std::to_string(d) + "]");
    if (c < 0) schema_fail(path + ".index[" + std::to_string(d) + "]", "negative coordinate");
    coords.push_back(static_cast<std::uint64_t>(c));
  }
  try {
    return g.cube_from_coordinates(static_cast<int>(level), coords);
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

Instance parse_instance(const Json& j) {
  const std::string root = "instance";
  reject_unknown_keys(j, root,
                      {"dimension", "depth", "sigma", "mu", "lambda", "exponents", "f", "g",
                       "families", "allocations", "sets", "beta", "wolff", "alpha", "carleson_c",
                       "expect_infeasible", "seed"});

  long long dimension = get_integer(member(j, root, "dimension"), root + ".dimension");
  long long depth = get_integer(member(j, root, "depth"), root + ".depth");
  Grid grid = [&] {
    try {
      return Grid(static_cast<int>(dimension), static_cast<int>(depth));
    } catch (const Error& e) {
      schema_fail(root, e.what());
    }
  }();

  auto sigma_values = get_scalar_array(member(j, root, "sigma"), root + ".sigma", grid.leaf_count());
  auto mu_values = get_scalar_array(member(j, root, "mu"), root + ".mu", grid.leaf_count());

  auto split = [](const std::vector<ScalarValue>& values) {
    std::pair<std::vector<double>, std::vector<Rational>> out;
    for (const ScalarValue& v : values) {
      out.first.push_back(v.value);
      out.second.push_back(v.exact);
    }
    return out;
  };
  auto [sigma_d, sigma_x] = split(sigma_values);
  auto [mu_d, mu_x] = split(mu_values);
  for (std::size_t i = 0; i < sigma_x.size(); ++i) {
    if (sigma_x[i] < 0) schema_fail(root + ".sigma[" + std::to_string(i) + "]", "negative mass");
    if (mu_x[i] < 0) schema_fail(root + ".mu[" + std::to_string(i) + "]", "negative mass");
  }

  Instance instance{grid,
                    LeafMeasure(grid, sigma_d, "sigma"),
                    LeafMeasure(grid, mu_d, "mu"),
                    CubeCoefficients{},
                    ExactData{std::move(sigma_x), std::move(mu_x), {}},
                    0,
                    {}, {}, {}, {}, {}, {}, {}, {}, {}, {},
                    false,
                    0};

  const Json& lambda = member(j, root, "lambda");
  if (!lambda.is_array()) schema_fail(root + ".lambda", "expected an array");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    std::string path = root + ".lambda[" + std::to_string(i) + "]";
    reject_unknown_keys(lambda[i], path, {"level", "index", "value"});
    CubeId q = cube_from_json(grid, Json{{"level", member(lambda[i], path, "level")},
                                         {"index", member(lambda[i], path, "index")}},
                              path);
    ScalarValue value = get_scalar(member(lambda[i], path, "value"), path + ".value");
    if (value.exact < 0) schema_fail(path + ".value", "negative coefficient");
    if (instance.lambda.values.count(q)) schema_fail(path, "duplicate cube");
    instance.lambda.values[q] = value.value;
    instance.exact.lambda[q] = value.exact;
  }
  instance.coerced_coefficients = coerce_coefficients(grid, instance.lambda, instance.sigma);
  for (auto it = instance.exact.lambda.begin(); it != instance.exact.lambda.end();) {
    if (!instance.lambda.values.count(it->first)) {
      it = instance.exact.lambda.erase(it);
    } else {
      ++it;
    }
  }

  if (const Json* exponents = optional_member(j, "exponents")) {
    std::string path = root + ".exponents";
    reject_unknown_keys(*exponents, path, {"p", "q", "s"});
    double p = get_double(member(*exponents, path, "p"), path + ".p");
    double q = get_double(member(*exponents, path, "q"), path + ".q");
    double s = get_exponent_value(member(*exponents, path, "s"), path + ".s");
    try {
      instance.exponents = Exponents::make(p, q, s);
    } catch (const Error& e) {
      schema_fail(path, e.what());
    }
  }

  if (const Json* f = optional_member(j, "f")) {
    auto values = get_scalar_array(*f, root + ".f", grid.leaf_count());
    std::vector<double> doubles;
    for (const ScalarValue& v : values) doubles.push_back(v.value);
    LeafFunction function{std::move(doubles)};
    check_function(grid, function);
    instance.f = std::move(function);
  }

  if (const Json* g = optional_member(j, "g")) {
    if (!g->is_array()) schema_fail(root + ".g", "expected an array");
    CubeVector vector;
    for (std::size_t i = 0; i < g->size(); ++i) {
      std::string path = root + ".g[" + std::to_string(i) + "]";
      reject_unknown_keys((*g)[i], path, {"level", "index", "value"});
      CubeId q = cube_from_json(grid, Json{{"level", member((*g)[i], path, "level")},
                                           {"index", member((*g)[i], path, "index")}},
                                path);
      double value = get_scalar(member((*g)[i], path, "value"), path + ".value").value;
      if (vector.values.count(q)) schema_fail(path, "duplicate cube");
      vector.values[q] = value;
    }
    instance.g = std::move(vector);
  }

  if (const Json* families = optional_member(j, "families")) {
    if (!families->is_object()) schema_fail(root + ".families", "expected an object");
    for (auto it = families->begin(); it != families->end(); ++it) {
      std::string path = root + ".families." + it.key();
      if (!it->is_array()) schema_fail(path, "expected an array of cubes");
      CubeFamily family;
      for (std::size_t i = 0; i < it->size(); ++i) {
        CubeId q = cube_from_json(grid, (*it)[i], path + "[" + std::to_string(i) + "]");
        if (!family.cubes.insert(q).second) {
          schema_fail(path + "[" + std::to_string(i) + "]", "duplicate cube");
        }
      }
      instance.families[it.key()] = std::move(family);
    }
  }

  if (const Json* allocations = optional_member(j, "allocations")) {
    if (!allocations->is_object()) schema_fail(root + ".allocations", "expected an object");
    for (auto it = allocations->begin(); it != allocations->end(); ++it) {
      std::string path = root + ".allocations." + it.key();
      if (!it->is_array()) schema_fail(path, "expected an array");
      DisjointAllocation allocation;
      for (std::size_t i = 0; i < it->size(); ++i) {
        std::string entry_path = path + "[" + std::to_string(i) + "]";
        reject_unknown_keys((*it)[i], entry_path, {"cube", "leaf_fractions"});
        CubeId q = cube_from_json(grid, member((*it)[i], entry_path, "cube"), entry_path + ".cube");
        if (allocation.sets.count(q)) schema_fail(entry_path, "duplicate cube");
        allocation.sets[q] = get_fractional_set(member((*it)[i], entry_path, "leaf_fractions"), grid,
                                                entry_path + ".leaf_fractions");
      }
      try {
        validate_allocation(grid, allocation, 1e-9);
      } catch (const Error& e) {
        schema_fail(path, e.what());
      }
      instance.allocations[it.key()] = std::move(allocation);
    }
  }

  if (const Json* sets = optional_member(j, "sets")) {
    if (!sets->is_object()) schema_fail(root + ".sets", "expected an object");
    for (auto it = sets->begin(); it != sets->end(); ++it) {
      instance.sets[it.key()] = get_fractional_set(*it, grid, root + ".sets." + it.key());
    }
  }

  if (const Json* beta = optional_member(j, "beta")) {
    if (!beta->is_array()) schema_fail(root + ".beta", "expected an array");
    CubeMap values;
    for (std::size_t i = 0; i < beta->size(); ++i) {
      std::string path = root + ".beta[" + std::to_string(i) + "]";
      reject_unknown_keys((*beta)[i], path, {"level", "index", "value"});
      CubeId q = cube_from_json(grid, Json{{"level", member((*beta)[i], path, "level")},
                                           {"index", member((*beta)[i], path, "index")}},
                                path);
      double value = get_scalar(member((*beta)[i], path, "value"), path + ".value").value;
      if (value < 0) schema_fail(path + ".value", "negative coefficient");
      if (values.count(q)) schema_fail(path, "duplicate cube");
      values[q] = value;
    }
    instance.beta = std::move(values);
  }

  if (const Json* wolff = optional_member(j, "wolff")) {
    std::string path = root + ".wolff";
    reject_unknown_keys(*wolff, path, {"alpha", "s"});
    WolffParams params{get_double(member(*wolff, path, "alpha"), path + ".alpha"),
                       get_double(member(*wolff, path, "s"), path + ".s")};
    try {
      validate_wolff_params(grid, params);
    } catch (const Error& e) {
      schema_fail(path, e.what());
    }
    instance.wolff = params;
  }

  if (const Json* alpha = optional_member(j, "alpha")) {
    double value = get_double(*alpha, root + ".alpha");
    if (!(value > 0.0)) schema_fail(root + ".alpha", "expected a positive number");
    instance.alpha = value;
  }

  if (const Json* c = optional_member(j, "carleson_c")) {
    double value = get_scalar(*c, root + ".carleson_c").value;
    if (!(value > 0.0)) schema_fail(root + ".carleson_c", "expected a positive number");
    instance.carleson_c = value;
  }

  if (const Json* expect = optional_member(j, "expect_infeasible")) {
    instance.expect_infeasible = get_bool(*expect, root + ".expect_infeasible");
  }

  if (const Json* seed = optional_member(j, "seed")) {
    long long value = get_integer(*seed, root + ".seed");
    if (value < 0) schema_fail(root + ".seed", "expected a non-negative integer");
    instance.seed = static_cast<std::uint64_t>(value);
  }

  return instance;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_input, "cannot open instance file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    fail(Errc::schema_violation, path + ": " + e.what());
  }
  return parse_instance(j);
}

Json instance_to_json(const Instance& instance) {
  const Grid& grid = instance.grid;
  Json j;
  j["dimension"] = grid.dimension();
  j["depth"] = grid.depth();
  j["sigma"] = instance.sigma.leaf_masses();
  j["mu"] = instance.mu.leaf_masses();

  Json lambda = Json::array();
  for (const auto& [q, value] : instance.lambda.values) {
    Json entry = cube_to_json(grid, q);
    entry["value"] = value;
    lambda.push_back(std::move(entry));
  }
  j["lambda"] = std::move(lambda);

  if (instance.exponents) {
    Json e{{"p", instance.exponents->p}, {"q", instance.exponents->q}};
    if (instance.exponents->s_infinite()) {
      e["s"] = "inf";
    } else {
      e["s"] = instance.exponents->s;
    }
    j["exponents"] = std::move(e);
  }
  if (instance.f) {
    Json values = Json::array();
    for (std::uint64_t leaf = 0; leaf < grid.leaf_count(); ++leaf) values.push_back((*instance.f)[leaf]);
    j["f"] = std::move(values);
  }
  if (instance.g) {
    Json values = Json::array();
    for (const auto& [q, value] : instance.g->values) {
      Json entry = cube_to_json(grid, q);
      entry["value"] = value;
      values.push_back(std::move(entry));
    }
    j["g"] = std::move(values);
  }
  if (!instance.families.empty()) {
    Json families = Json::object();
    for (const auto& [name, family] : instance.families) {
      Json cubes = Json::array();
      for (CubeId q : family.cubes) cubes.push_back(cube_to_json(grid, q));
      families[name] = std::move(cubes);
    }
    j["families"] = std::move(families);
  }
  if (!instance.allocations.empty()) {
    Json allocations = Json::object();
    for (const auto& [name, allocation] : instance.allocations) {
      Json entries = Json::array();
      for (const auto& [q, set] : allocation.sets) {
        Json fractions = Json::object();
        for (const auto& [leaf, frac] : set.fractions) fractions[std::to_string(leaf)] = frac;
        entries.push_back(Json{{"cube", cube_to_json(grid, q)}, {"leaf_fractions", std::move(fractions)}});
      }
      allocations[name] = std::move(entries);
    }
    j["allocations"] = std::move(allocations);
  }
  if (!instance.sets.empty()) {
    Json sets = Json::object();
    for (const auto& [name, set] : instance.sets) {
      Json fractions = Json::object();
      for (const auto& [leaf, frac] : set.fractions) fractions[std::to_string(leaf)] = frac;
      sets[name] = std::move(fractions);
    }
    j["sets"] = std::move(sets);
  }
  if (instance.beta) {
    Json values = Json::array();
    for (const auto& [q, value] : *instance.beta) {
      Json entry = cube_to_json(grid, q);
      entry["value"] = value;
      values.push_back(std::move(entry));
    }
    j["beta"] = std::move(values);
  }
  if (instance.wolff) {
    j["wolff"] = Json{{"alpha", instance.wolff->alpha}, {"s", instance.wolff->s}};
  }
  if (instance.alpha) j["alpha"] = *instance.alpha;
  if (instance.carleson_c) j["carleson_c"] = *instance.carleson_c;
  if (instance.expect_infeasible) j["expect_infeasible"] = true;
  if (instance.seed != 0) j["seed"] = instance.seed;
  return j;
}

}  // namespace dyadic
