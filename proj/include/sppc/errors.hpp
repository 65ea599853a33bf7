#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sppc {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  NonSymmetric,
  NotPositiveDefinite,
  RankDeficient,
  NonConjugatePoles,
  NotReachable,
  NoConvergence,
  DegenerateInput,
  Infeasible,
  BufferExhausted,
  InvalidArgument,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Coarse classification used for process exit codes and C API status values.
enum class ErrorCategory { Config = 1, Numeric = 2, Simulation = 3 };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace sppc
