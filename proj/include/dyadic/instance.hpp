#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

#include "dyadic/conditions.hpp"
#include "dyadic/wolff.hpp"

namespace dyadic {

using Json = nlohmann::json;

// Exact-arithmetic copies of the numeric payload, parsed from the same
// literals (decimal strings stay decimal-exact, doubles convert exactly).
struct ExactData {
  std::vector<Rational> sigma;
  std::vector<Rational> mu;
  BasicCubeMap<Rational> lambda;
};

// One fully validated problem instance.
struct Instance {
  Grid grid;
  LeafMeasure sigma;
  LeafMeasure mu;
  CubeCoefficients lambda;
  ExactData exact;
  int coerced_coefficients = 0;  // lambda entries zeroed on sigma-null cubes

  std::optional<Exponents> exponents;
  std::optional<LeafFunction> f;
  std::optional<CubeVector> g;
  std::map<std::string, CubeFamily> families;
  std::map<std::string, DisjointAllocation> allocations;
  std::map<std::string, FractionalSet> sets;
  std::optional<CubeMap> beta;
  std::optional<WolffParams> wolff;
  std::optional<double> alpha;       // weak-condition exponent
  std::optional<double> carleson_c;  // allocation level for the dor check
  bool expect_infeasible = false;
  std::uint64_t seed = 0;
};

Json cube_to_json(const Grid& g, CubeId q);
CubeId cube_from_json(const Grid& g, const Json& j, const std::string& path);

Instance parse_instance(const Json& j);
Instance load_instance_file(const std::string& path);
Json instance_to_json(const Instance& instance);

}  // namespace dyadic
