#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdg {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidGame,
  kParseError,
  kStepTooLarge,
  kNonFinite,
  kDimensionMismatch,
  kActionNotAdmissible,
  kBudgetExceeded,
  kDimensionTooHigh,
  kNonContraction,
  kNoConvergence,
  kKernelTooFast,
  kDomainError,
  kSingularSystem,
  kGradientUnavailable,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidGame: return "InvalidGame";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kStepTooLarge: return "StepTooLarge";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kActionNotAdmissible: return "ActionNotAdmissible";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kDimensionTooHigh: return "DimensionTooHigh";
    case ErrorCode::kNonContraction: return "NonContraction";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kKernelTooFast: return "KernelTooFast";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kGradientUnavailable: return "GradientUnavailable";
  }
  return "Unknown";
}

// All library failures are reported through this type; code() lets callers
// (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sdg
