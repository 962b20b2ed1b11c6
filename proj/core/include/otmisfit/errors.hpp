#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otm {

enum class ErrorCode {
  InvalidGrid,
  InvalidArgument,
  GridMismatch,
  ParseError,
  ZeroMass,
  MassMismatchUnresolvable,
  SupportTooLarge,
  InvalidConfig,
  SingularSystem,
  NoConvergence,
  EventOutsideWindow,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by the library. Index errors on stencils use
/// std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace otm
