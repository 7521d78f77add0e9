#pragma once

#include <map>

#include "dyadic/runner.hpp"

namespace dyadic {

struct SuiteOptions {
  std::uint64_t seed = 42;
  int threads = 1;
  double scale = 1.0;  // multiplies every criterion's instance count
  bool want_csv = false;
};

struct SuiteResult {
  Json summary;
  bool pass = true;
  std::string csv;
  std::map<std::string, double> timings;  // seconds, not part of the summary
};

// Runs the full randomized property suite (criteria are numbered in the
// summary) and returns a deterministic summary for a fixed seed.
SuiteResult run_suite(const SuiteOptions& options);

}  // namespace dyadic
