#include "sppc/errors.hpp"

namespace sppc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonConjugatePoles: return "NonConjugatePoles";
    case ErrorCode::NotReachable: return "NotReachable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::BufferExhausted: return "BufferExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::NotReachable:
    case ErrorCode::NonConjugatePoles:
      return ErrorCategory::Config;
    case ErrorCode::BufferExhausted:
      return ErrorCategory::Simulation;
    default:
      return ErrorCategory::Numeric;
  }
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sppc
