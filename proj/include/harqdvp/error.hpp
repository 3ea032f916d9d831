#pragma once

#include <stdexcept>
#include <string>

namespace harqdvp {

enum class ErrorCode {
  kInvalidArgument,
  kInfeasibleAllocation,
  kUnstableQueue,
  kNoConvergence,
  kConfigError,
  kIoError,
};

// Single exception type for the library; the C layer maps `code()` onto
// its integer status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace harqdvp
