#include "dirac/errors.hpp"

namespace dirac {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidProblem: return "InvalidProblem";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::kDegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kPositionMismatch: return "PositionMismatch";
    case ErrorCode::kWindowTooWide: return "WindowTooWide";
    case ErrorCode::kNotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::kClosureViolated: return "ClosureViolated";
    case ErrorCode::kGridTooCoarse: return "GridTooCoarse";
    case ErrorCode::kPoleAtEigenvalue: return "PoleAtEigenvalue";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kZeroEigenvalueInList: return "ZeroEigenvalueInList";
    case ErrorCode::kMatchingFailure: return "MatchingFailure";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kInconsistent: return "Inconsistent";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace dirac
