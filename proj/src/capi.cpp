#include "dyadic/dyadic_c.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "dyadic/errors.hpp"
#include "dyadic/runner.hpp"
#include "dyadic/suite.hpp"

struct dy_instance {
  dyadic::Instance value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out != nullptr) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

int code_of(const dyadic::Error& e) {
  switch (e.code()) {
    case dyadic::Errc::invalid_input:
    case dyadic::Errc::schema_violation:
      return DY_ERR_INPUT;
    default:
      return DY_ERR_EVAL;
  }
}

int record_error(const dyadic::Error& e) {
  g_last_error = std::string(dyadic::errc_name(e.code())) + ": " + e.what();
  return code_of(e);
}

int record_error(const std::exception& e) {
  g_last_error = e.what();
  return DY_ERROR;
}

dyadic::RunOptions to_run_options(const dy_options* options) {
  dyadic::RunOptions out;
  if (options == nullptr) return out;
  dyadic::require(options->threads >= 1, dyadic::Errc::invalid_input,
                  "threads must be at least 1");
  out.seed = options->seed;
  out.threads = options->threads;
  out.exact = options->exact != 0;
  out.atomic_mode = options->atomic != 0;
  out.variant = options->variant != 0;
  out.want_csv = options->csv != 0;
  return out;
}

}  // namespace

extern "C" {

void dy_options_init(dy_options* options) {
  if (options == nullptr) return;
  options->seed = 42;
  options->threads = 1;
  options->exact = 0;
  options->atomic = 0;
  options->variant = 0;
  options->csv = 0;
}

int dy_instance_load_file(const char* path, dy_instance** out) {
  if (path == nullptr || out == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  *out = nullptr;
  try {
    auto* instance = new dy_instance{dyadic::load_instance_file(path)};
    *out = instance;
    g_last_error.clear();
    return DY_OK;
  } catch (const dyadic::Error& e) {
    return record_error(e);
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

int dy_instance_parse(const char* json_text, dy_instance** out) {
  if (json_text == nullptr || out == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  *out = nullptr;
  try {
    dyadic::Json j = dyadic::Json::parse(json_text);
    auto* instance = new dy_instance{dyadic::parse_instance(j)};
    *out = instance;
    g_last_error.clear();
    return DY_OK;
  } catch (const dyadic::Json::exception& e) {
    g_last_error = std::string("SchemaViolation: ") + e.what();
    return DY_ERR_INPUT;
  } catch (const dyadic::Error& e) {
    return record_error(e);
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

int dy_instance_dump(const dy_instance* instance, char** json_out) {
  if (instance == nullptr || json_out == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  try {
    *json_out = dup_string(dyadic::instance_to_json(instance->value).dump(2));
    g_last_error.clear();
    return DY_OK;
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

void dy_instance_free(dy_instance* instance) { delete instance; }

int dy_eval(const dy_instance* instance, const char* what, const dy_options* options,
            char** report_json) {
  if (instance == nullptr || what == nullptr || report_json == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  *report_json = nullptr;
  try {
    dyadic::RunResult result = dyadic::run_eval(instance->value, what, to_run_options(options));
    *report_json = dup_string(result.report.dump(2));
    g_last_error.clear();
    return DY_OK;
  } catch (const dyadic::Error& e) {
    return record_error(e);
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

int dy_check(const dy_instance* instance, const char* what, const dy_options* options,
             char** report_json) {
  if (instance == nullptr || what == nullptr || report_json == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  *report_json = nullptr;
  try {
    dyadic::RunResult result = dyadic::run_check(instance->value, what, to_run_options(options));
    *report_json = dup_string(result.report.dump(2));
    g_last_error.clear();
    return result.gate_failed ? DY_ERR_GATE : DY_OK;
  } catch (const dyadic::Error& e) {
    return record_error(e);
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

int dy_suite(uint64_t seed, double scale, const dy_options* options, char** summary_json) {
  if (summary_json == nullptr) {
    g_last_error = "InvalidInput: null argument";
    return DY_ERR_INPUT;
  }
  *summary_json = nullptr;
  try {
    dyadic::SuiteOptions suite_options;
    suite_options.seed = seed;
    suite_options.scale = scale;
    if (options != nullptr) {
      dyadic::require(options->threads >= 1, dyadic::Errc::invalid_input,
                      "threads must be at least 1");
      suite_options.threads = options->threads;
      suite_options.want_csv = options->csv != 0;
    }
    dyadic::SuiteResult result = dyadic::run_suite(suite_options);
    if (suite_options.want_csv) result.summary["csv"] = result.csv;
    *summary_json = dup_string(result.summary.dump(2));
    g_last_error.clear();
    return result.pass ? DY_OK : DY_ERR_GATE;
  } catch (const dyadic::Error& e) {
    return record_error(e);
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

void dy_string_free(char* text) { std::free(text); }

const char* dy_last_error(void) { return g_last_error.c_str(); }

const char* dy_version(void) { return "1.0.0"; }

}  // extern "C"
