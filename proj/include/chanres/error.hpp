#pragma once

#include <stdexcept>
#include <string>

namespace chanres {

enum class ErrorCode {
  ShapeMismatch,
  CompletenessViolation,
  DimensionMismatch,
  DimensionGuardExceeded,
  InvalidState,
  NumericalFailure,
  SolverFailure,
  EpsilonOutOfRange,
  UnsupportedDims,
  UnsupportedTheory,
  MissingTarget,
  ParseError,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chanres
