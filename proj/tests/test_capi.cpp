#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include "dyadic/dyadic_c.h"

using nlohmann::json;

namespace {

const char* kSingleCube = R"({
  "dimension": 1,
  "depth": 1,
  "sigma": [1, 1],
  "mu": [1, 1],
  "lambda": [{"level": 0, "index": [0], "value": 1}],
  "exponents": {"p": 3, "q": 2, "s": 2},
  "g": [{"level": 0, "index": [0], "value": 1}]
})";

struct Handle {
  dy_instance* ptr = nullptr;
  ~Handle() { dy_instance_free(ptr); }
};

json eval_report(dy_instance* instance, const char* what,
                 const dy_options* options = nullptr) {
  char* out = nullptr;
  REQUIRE(dy_eval(instance, what, options, &out) == DY_OK);
  REQUIRE(out != nullptr);
  json report = json::parse(out);
  dy_string_free(out);
  return report;
}

}  // namespace

TEST_CASE("options initialize to defaults") {
  dy_options options;
  dy_options_init(&options);
  CHECK(options.seed == 42);
  CHECK(options.threads == 1);
  CHECK(options.exact == 0);
  CHECK(options.atomic == 0);
  CHECK(options.variant == 0);
  CHECK(options.csv == 0);
}

TEST_CASE("version string") {
  CHECK(dy_version() != nullptr);
  CHECK(std::strlen(dy_version()) > 0);
}

TEST_CASE("parse, eval, dump") {
  Handle h;
  REQUIRE(dy_instance_parse(kSingleCube, &h.ptr) == DY_OK);

  json report = eval_report(h.ptr, "norm");
  CHECK(report["value"].get<double>() ==
        doctest::Approx(std::pow(2.0, 7.0 / 6.0)).epsilon(1e-6));

  char* dumped = nullptr;
  REQUIRE(dy_instance_dump(h.ptr, &dumped) == DY_OK);
  json round = json::parse(dumped);
  CHECK(round["dimension"] == 1);
  CHECK(round["exponents"]["p"] == 3.0);
  dy_string_free(dumped);

  json tstar = eval_report(h.ptr, "Tstar");
  CHECK(tstar.contains("values"));
}

TEST_CASE("instances load from the repository fixtures") {
  Handle h;
  REQUIRE(dy_instance_load_file(INSTANCES_DIR "/single_cube.json", &h.ptr) ==
          DY_OK);
  json report = eval_report(h.ptr, "norm");
  CHECK(report["value"].get<double>() ==
        doctest::Approx(std::pow(2.0, 7.0 / 6.0)).epsilon(1e-6));
}

TEST_CASE("atomic allocation fails where fractional splits succeed") {
  Handle h;
  REQUIRE(dy_instance_load_file(INSTANCES_DIR "/atomic_infeasible.json", &h.ptr) ==
          DY_OK);

  dy_options options;
  dy_options_init(&options);
  options.atomic = 1;
  options.exact = 1;
  char* out = nullptr;
  CHECK(dy_check(h.ptr, "dor", &options, &out) == DY_OK);
  json report = json::parse(out);
  dy_string_free(out);
  CHECK(report["pass"] == true);
  CHECK(report["feasible"] == false);

  dy_options split;
  dy_options_init(&split);
  split.exact = 1;
  out = nullptr;
  CHECK(dy_check(h.ptr, "dor", &split, &out) == DY_ERR_GATE);
  json fractional = json::parse(out);
  dy_string_free(out);
  CHECK(fractional["feasible"] == true);
}

TEST_CASE("input errors set a message and code") {
  dy_instance* instance = nullptr;
  CHECK(dy_instance_parse("{ not json", &instance) == DY_ERR_INPUT);
  CHECK(instance == nullptr);
  CHECK(std::strlen(dy_last_error()) > 0);

  CHECK(dy_instance_parse(R"({"dimension": 1})", &instance) == DY_ERR_INPUT);
  CHECK(dy_instance_load_file("missing_file.json", &instance) == DY_ERR_INPUT);

  CHECK(dy_instance_parse(nullptr, &instance) == DY_ERR_INPUT);
  CHECK(dy_eval(nullptr, "norm", nullptr, nullptr) == DY_ERR_INPUT);

  Handle h;
  REQUIRE(dy_instance_parse(kSingleCube, &h.ptr) == DY_OK);
  char* out = nullptr;
  CHECK(dy_eval(h.ptr, "nonsense", nullptr, &out) == DY_ERR_INPUT);
  CHECK(dy_eval(h.ptr, "weak", nullptr, &out) == DY_ERR_INPUT);
  CHECK(dy_check(h.ptr, "nonsense", nullptr, &out) == DY_ERR_INPUT);
}

TEST_CASE("suite scale zero produces an empty passing summary") {
  char* out = nullptr;
  REQUIRE(dy_suite(42, 0.0, nullptr, &out) == DY_OK);
  json summary = json::parse(out);
  dy_string_free(out);
  CHECK(summary["pass"] == true);
  CHECK(summary["seed"] == 42);
  for (const json& entry : summary["criteria"])
    CHECK(entry["instances"] == 0);
}

TEST_CASE("suite rejects invalid option values") {
  dy_options options;
  dy_options_init(&options);
  options.threads = 0;
  char* out = nullptr;
  CHECK(dy_suite(42, 0.1, &options, &out) == DY_ERR_INPUT);
}

TEST_CASE("tiny suite run is deterministic") {
  dy_options options;
  dy_options_init(&options);
  char* first = nullptr;
  char* second = nullptr;
  REQUIRE(dy_suite(7, 0.02, &options, &first) == DY_OK);
  REQUIRE(dy_suite(7, 0.02, &options, &second) == DY_OK);
  CHECK(std::string(first) == std::string(second));

  char* other = nullptr;
  REQUIRE(dy_suite(8, 0.02, &options, &other) == DY_OK);
  CHECK(std::string(other) != std::string(first));

  dy_string_free(first);
  dy_string_free(second);
  dy_string_free(other);
}
