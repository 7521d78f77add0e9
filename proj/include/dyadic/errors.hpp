#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

enum class Errc {
  invalid_input,
  schema_violation,
  zero_mass_cube,
  empty_set,
  mass_unavailable,
  infeasible,
  too_large,
  not_covered,
  zero_denominator,
  overlapping_allocation,
  zero_measure,
  zero_function,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace dyadic
