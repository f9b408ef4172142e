#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dirac {

enum class ErrorCode {
  kInvalidProblem,
  kParse,
  kZeroLeadingCoefficient,
  kDegenerateLeadingCoefficient,
  kStepUnderflow,
  kNonFinite,
  kPositionMismatch,
  kWindowTooWide,
  kNotAnEigenvalue,
  kClosureViolated,
  kGridTooCoarse,
  kPoleAtEigenvalue,
  kEmptyGrid,
  kZeroEigenvalueInList,
  kMatchingFailure,
  kNonConvergence,
  kInconsistent,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes failure kinds
/// and `operation()` names the routine that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string operation, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + " in " + operation +
                           ": " + message),
        code_(code),
        operation_(std::move(operation)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  ErrorCode code_;
  std::string operation_;
};

}  // namespace dirac
