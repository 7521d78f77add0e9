#pragma once

#include <string>

#include "dyadic/instance.hpp"

namespace dyadic {

struct RunOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  bool exact = false;        // rational arithmetic where supported
  bool atomic_mode = false;  // whole-leaf allocations
  bool variant = false;      // alternate readings (localized test functions,
                             // alternate weak-norm layout)
  bool want_csv = false;     // include a "csv" table in the report
};

struct RunResult {
  Json report;
  bool gate_failed = false;
};

// what: norm, T, Tstar, mixed, weak, wolff.
RunResult run_eval(const Instance& instance, const std::string& what,
                   const RunOptions& options);

// what: thm12, thm11, sparse, carleson, dor, lemma45, lemma47, weak.
RunResult run_check(const Instance& instance, const std::string& what,
                    const RunOptions& options);

}  // namespace dyadic
