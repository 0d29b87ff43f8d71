#include "ssm/error.hpp"

namespace ssm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::TolNotReached: return "TolNotReached";
    case ErrorCode::SingularMap: return "SingularMap";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::PrefixTooLong: return "PrefixTooLong";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WindowInfeasible: return "WindowInfeasible";
    case ErrorCode::NoAdmissible: return "NoAdmissible";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnknownFormula: return "UnknownFormula";
    case ErrorCode::ROutOfDomain: return "ROutOfDomain";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

}  // namespace ssm
