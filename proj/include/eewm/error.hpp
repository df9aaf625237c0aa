#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eewm {

enum class ErrorKind {
  NotSymmetric,
  NotPSD,
  NotToeplitz,
  InvalidParam,
  DimensionMismatch,
  FactorizationFailure,
  TooFewSamples,
  SingularSum,
  DegenerateWatermark,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so
// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eewm
