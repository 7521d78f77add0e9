#include "dyadic/errors.hpp"

namespace dyadic {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "InvalidInput";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::zero_mass_cube: return "ZeroMassCube";
    case Errc::empty_set: return "EmptySet";
    case Errc::mass_unavailable: return "MassUnavailable";
    case Errc::infeasible: return "Infeasible";
    case Errc::too_large: return "TooLarge";
    case Errc::not_covered: return "NotCovered";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::overlapping_allocation: return "OverlappingAllocation";
    case Errc::zero_measure: return "ZeroMeasure";
    case Errc::zero_function: return "ZeroFunction";
  }
  return "Unknown";
}

}  // namespace dyadic
