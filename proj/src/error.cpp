#include "conangle/error.hpp"

namespace conangle {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::zero_direction: return "ZeroDirection";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::iteration_limit: return "IterationLimit";
    case Errc::unsupported_dimension: return "UnsupportedDimension";
    case Errc::identity_not_applicable: return "IdentityNotApplicable";
    case Errc::hypothesis_violated: return "HypothesisViolated";
    case Errc::witness_not_found: return "WitnessNotFound";
    case Errc::dichotomy_failure: return "DichotomyFailure";
    case Errc::sign_condition_violated: return "SignConditionViolated";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::resolve_error: return "ResolveError";
  }
  return "Unknown";
}

}  // namespace conangle
