#ifndef PCLQ_ERRORS_HPP_
#define PCLQ_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pclq {

// Failure categories surfaced by the numerical kernels. The CLI maps any
// Error to exit code 2; tests dispatch on code().
enum class ErrorCode {
  kShapeMismatch,
  kNonFinite,
  kBadArgument,
  kMaxIterExceeded,
  kSingularInnerSolve,
  kUnstablePolicy,
  kUnstableInitialPolicy,
  kInvariantViolation,
  kDegenerateResidual,
  kDegenerateBlock,
  kSigmaZeroUnknown,
  kIoFailure,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace pclq

#endif  // PCLQ_ERRORS_HPP_
