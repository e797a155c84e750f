#pragma once

#include <stdexcept>
#include <string>

namespace mvo {

enum class ErrorCode {
  AngleNearPi,
  GimbalLock,
  BehindCamera,
  DisparityTooSmall,
  ConfigInvalid,
  InsufficientOverlap,
  NoModelsFound,
  RankDeficient,
  ParseError,
};

const char* to_string(ErrorCode code);

// Single exception type for every recoverable failure in the library; callers
// branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mvo
