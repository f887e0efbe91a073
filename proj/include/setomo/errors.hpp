#pragma once

#include <stdexcept>
#include <string>

namespace setomo {

enum class ErrorKind {
  kInvalidArgument,
  kDegenerateKernel,
  kOutOfRange,
  kReconstructionFailed,
  kNumeric,
  kConfig,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDegenerateKernel: return "degenerate-kernel";
    case ErrorKind::kOutOfRange: return "out-of-range";
    case ErrorKind::kReconstructionFailed: return "reconstruction-failed";
    case ErrorKind::kNumeric: return "numeric-error";
    case ErrorKind::kConfig: return "config-error";
  }
  return "unknown";
}

// Every failure raised by the toolkit carries one of the kinds above so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace setomo
