#pragma once

#include <stdexcept>
#include <string>

namespace projdim {

// Mirrors projdim_status in projdim.h; keep the numeric values in sync.
enum class ErrorCode : int {
  invalid_argument = 1,
  malformed_input = 2,
  invariant_violation = 3,
  tiling_failure = 4,
  degenerate = 5,
  non_bracketing = 6,
  numerical = 7,
  unsupported = 8,
  io = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace projdim
