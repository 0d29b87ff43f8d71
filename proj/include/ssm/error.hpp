#pragma once

#include <stdexcept>
#include <string>

namespace ssm {

enum class ErrorCode {
  DimensionMismatch,
  RatioOutOfRange,
  NotOrthogonal,
  NotSeparated,
  TolNotReached,
  SingularMap,
  CapacityExceeded,
  PrefixTooLong,
  IndexOutOfRange,
  WindowInfeasible,
  NoAdmissible,
  TooLarge,
  UnknownFormula,
  ROutOfDomain,
  DegenerateInterval,
  ParseError,
};

const char* error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ssm
