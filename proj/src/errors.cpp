#include "pclq/errors.hpp"

namespace pclq {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kBadArgument: return "BadArgument";
    case ErrorCode::kMaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::kSingularInnerSolve: return "SingularInnerSolve";
    case ErrorCode::kUnstablePolicy: return "UnstablePolicy";
    case ErrorCode::kUnstableInitialPolicy: return "UnstableInitialPolicy";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kDegenerateResidual: return "DegenerateResidual";
    case ErrorCode::kDegenerateBlock: return "DegenerateBlock";
    case ErrorCode::kSigmaZeroUnknown: return "SigmaZeroUnknown";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "UnknownError";
}

}  // namespace pclq
