#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "dyadic/instance.hpp"

using namespace dyadic;

namespace {

Json base_instance() {
  return Json::parse(R"({
    "dimension": 1,
    "depth": 1,
    "sigma": [1, 1],
    "mu": [1, 1],
    "lambda": [{"level": 0, "index": [0], "value": 1}]
  })");
}

std::string violation_path(const Json& j) {
  try {
    parse_instance(j);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::schema_violation);
    return e.what();
  }
  FAIL("expected a schema violation");
  return {};
}

}  // namespace

TEST_CASE("minimal instance parses") {
  Instance instance = parse_instance(base_instance());
  CHECK(instance.grid.dimension() == 1);
  CHECK(instance.grid.depth() == 1);
  CHECK(instance.sigma.total() == 2.0);
  CHECK(instance.mu.total() == 2.0);
  CHECK(instance.lambda.at(instance.grid.root()) == 1.0);
  CHECK(instance.exact.lambda.at(instance.grid.root()) == 1);
  CHECK(instance.coerced_coefficients == 0);
  CHECK_FALSE(instance.exponents.has_value());
  CHECK(instance.seed == 0);
}

TEST_CASE("numeric strings parse exactly, doubles keep their binary value") {
  Json j = base_instance();
  j["sigma"] = Json::array({"0.1", 1});
  j["mu"][0] = 0.1;
  Instance instance = parse_instance(j);
  CHECK(instance.exact.sigma[0] == Rational(1, 10));
  CHECK(instance.sigma.leaf_mass(0) == to_double(Rational(1, 10)));
  CHECK(instance.exact.mu[0] == rational_from_double(0.1));
  CHECK(instance.exact.mu[0] != Rational(1, 10));
}

TEST_CASE("full instance round trips through serialization") {
  Json j = base_instance();
  j["exponents"] = Json{{"p", 3.0}, {"q", 2.0}, {"s", "inf"}};
  j["f"] = Json::array({1.0, 2.5});
  j["g"] = Json::array({Json{{"level", 1}, {"index", Json::array({0})}, {"value", -0.5}}});
  j["families"] = Json{{"F", Json::array({Json{{"level", 0}, {"index", Json::array({0})}}})}};
  j["allocations"] = Json{{"E", Json::array({Json{
      {"cube", Json{{"level", 0}, {"index", Json::array({0})}}},
      {"leaf_fractions", Json{{"0", 0.5}, {"1", 1.0}}}}})}};
  j["sets"] = Json{{"E", Json{{"1", 0.25}}}};
  j["beta"] = Json::array({Json{{"level", 0}, {"index", Json::array({0})}, {"value", 2.0}}});
  j["wolff"] = Json{{"alpha", 0.5}, {"s", 2.0}};
  j["alpha"] = 1.5;
  j["carleson_c"] = 1.0;
  j["expect_infeasible"] = true;
  j["seed"] = 7;

  Instance first = parse_instance(j);
  CHECK(first.exponents->s_infinite());
  CHECK(first.g->at(CubeId{1, 0}) == -0.5);
  CHECK(first.families.at("F").contains(first.grid.root()));
  CHECK(first.allocations.at("E").sets.at(first.grid.root()).fraction(0) == 0.5);
  CHECK(first.sets.at("E").fraction(1) == 0.25);
  CHECK(first.beta->at(first.grid.root()) == 2.0);
  CHECK(first.wolff->alpha == 0.5);
  CHECK(first.alpha == 1.5);
  CHECK(first.carleson_c == 1.0);
  CHECK(first.expect_infeasible);
  CHECK(first.seed == 7);

  Json dumped = instance_to_json(first);
  Instance second = parse_instance(dumped);
  CHECK(instance_to_json(second).dump() == dumped.dump());
}

TEST_CASE("schema violations carry the failing path") {
  Json missing = base_instance();
  missing.erase("mu");
  CHECK(violation_path(missing).find("instance.mu") != std::string::npos);

  Json unknown = base_instance();
  unknown["extra"] = 1;
  CHECK(violation_path(unknown).find("extra") != std::string::npos);

  Json short_sigma = base_instance();
  short_sigma["sigma"] = Json::array({1});
  CHECK(violation_path(short_sigma).find("instance.sigma") != std::string::npos);

  Json negative = base_instance();
  negative["sigma"][0] = -1;
  CHECK(violation_path(negative).find("instance.sigma[0]") != std::string::npos);

  Json bad_cube = base_instance();
  bad_cube["lambda"][0]["level"] = 4;
  CHECK(violation_path(bad_cube).find("instance.lambda[0]") != std::string::npos);

  Json dup = base_instance();
  dup["lambda"].push_back(dup["lambda"][0]);
  CHECK(violation_path(dup).find("instance.lambda[1]") != std::string::npos);

  Json bad_exponents = base_instance();
  bad_exponents["exponents"] = Json{{"p", 2.0}, {"q", 2.0}, {"s", 2.0}};
  CHECK(violation_path(bad_exponents).find("instance.exponents") !=
        std::string::npos);

  Json bad_leaf = base_instance();
  bad_leaf["sets"] = Json{{"E", Json{{"9", 0.5}}}};
  CHECK(violation_path(bad_leaf).find("instance.sets.E") != std::string::npos);

  Json bad_fraction = base_instance();
  bad_fraction["sets"] = Json{{"E", Json{{"0", 1.5}}}};
  CHECK(violation_path(bad_fraction).find("instance.sets.E") !=
        std::string::npos);

  Json bad_seed = base_instance();
  bad_seed["seed"] = "forty-two";
  CHECK(violation_path(bad_seed).find("instance.seed") != std::string::npos);

  Json bad_grid = base_instance();
  bad_grid["depth"] = -1;
  CHECK(violation_path(bad_grid).find("instance") != std::string::npos);
}

TEST_CASE("lambda entries on sigma-null cubes are coerced away") {
  Json j = base_instance();
  j["sigma"] = Json::array({1, 0});
  j["lambda"].push_back(
      Json{{"level", 1}, {"index", Json::array({1})}, {"value", 2}});
  Instance instance = parse_instance(j);
  CHECK(instance.coerced_coefficients == 1);
  CHECK(instance.lambda.at(CubeId{1, 1}) == 0.0);
  CHECK(instance.exact.lambda.count(CubeId{1, 1}) == 0);
  CHECK(instance.lambda.at(instance.grid.root()) == 1.0);
}

TEST_CASE("overlapping allocations are rejected at load time") {
  Json j = base_instance();
  j["allocations"] = Json{{"E", Json::array(
      {Json{{"cube", Json{{"level", 1}, {"index", Json::array({0})}}},
            {"leaf_fractions", Json{{"0", 1.0}}}},
       Json{{"cube", Json{{"level", 0}, {"index", Json::array({0})}}},
            {"leaf_fractions", Json{{"0", 0.5}}}}})}};
  CHECK(violation_path(j).find("instance.allocations.E") != std::string::npos);
}

TEST_CASE("instances load from disk") {
  Json j = base_instance();
  j["exponents"] = Json{{"p", 3.0}, {"q", 2.0}, {"s", 2.0}};
  const std::string path = "tmp_instance_test.json";
  {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }
  Instance instance = load_instance_file(path);
  CHECK(instance.exponents->p == 3.0);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "{ not json";
  }
  try {
    load_instance_file(path);
    FAIL("expected schema_violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::schema_violation);
  }
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_instance_file("does_not_exist.json"), Error);
}

TEST_CASE("error names are stable") {
  CHECK(std::string(errc_name(Errc::infeasible)) == "Infeasible");
  CHECK(std::string(errc_name(Errc::schema_violation)) == "SchemaViolation");
  CHECK(std::string(errc_name(Errc::too_large)) == "TooLarge");
}
