#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speclocal {

/// Failure categories. Every error raised by the library carries one of these
/// so that sweep drivers can record the failure kind per job.
enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  DimensionMismatch,
  SingularMatrix,
  BackendDisagreement,
  BoundaryEigenvalue,
  NotProjection,
  SingularSymbol,
  GaplessMass,
  FormatError,
  ValidationError,
  HypothesisViolated,
  StrictModeViolation,
  ContainmentViolation,
  IntegerityViolation,
  RefinementLimit,
  NonUnitary,
  RankAmbiguity,
  NotOddProjection,
  AmbiguousKernel,
  ResidueTooLarge,
  GapClosure,
  WindowInstability,
  ConfigError,
  LapackFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace speclocal
