#pragma once

#include <stdexcept>
#include <string>

namespace silhuetta {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  InvalidRig,
  IoError,
  EmptySilhouette,
  EmptyGrid,
  NotClosed,
  OverlappingPrimitives,
  IndexOutOfRange,
  DivideByZero,
};

const char* to_string(ErrorCode code);

// Every failure in the core library is reported as an Error carrying a code
// that the C layer maps one-to-one onto sil_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace silhuetta
