#pragma once

#include <stdexcept>
#include <string>

namespace expweb {

enum class ErrorCode {
  InvalidArgument,
  Overflow,
  ZeroValue,
  NotExpanding,
  MuNotExpanding,
  NuTooSmall,
  NotFound,
  DerivativeZero,
  PreconditionViolated,
  BoxNotInSector,
  ParamSearchFailed,
  WindingUnstable,
  ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto exit codes and reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace expweb
