#include "speclocal/error.hpp"

namespace speclocal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::BackendDisagreement: return "BackendDisagreement";
    case ErrorCode::BoundaryEigenvalue: return "BoundaryEigenvalue";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::SingularSymbol: return "SingularSymbol";
    case ErrorCode::GaplessMass: return "GaplessMass";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::StrictModeViolation: return "StrictModeViolation";
    case ErrorCode::ContainmentViolation: return "ContainmentViolation";
    case ErrorCode::IntegerityViolation: return "IntegerityViolation";
    case ErrorCode::RefinementLimit: return "RefinementLimit";
    case ErrorCode::NonUnitary: return "NonUnitary";
    case ErrorCode::RankAmbiguity: return "RankAmbiguity";
    case ErrorCode::NotOddProjection: return "NotOddProjection";
    case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorCode::ResidueTooLarge: return "ResidueTooLarge";
    case ErrorCode::GapClosure: return "GapClosure";
    case ErrorCode::WindowInstability: return "WindowInstability";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::LapackFailure: return "LapackFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace speclocal
