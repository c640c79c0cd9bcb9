#include "divproj/error.hpp"

namespace divproj {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NormalizerNotFound: return "NormalizerNotFound";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::EmptyFeasibleGrid: return "EmptyFeasibleGrid";
    case ErrorCode::NoAdmissibleTheta: return "NoAdmissibleTheta";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZero:
    case ErrorCode::NegativeWeight:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DomainError:
    case ErrorCode::UnknownLabel:
    case ErrorCode::EmptySample:
    case ErrorCode::Infeasible:
    case ErrorCode::InputError:
      return true;
    default:
      return false;
  }
}

}  // namespace divproj
