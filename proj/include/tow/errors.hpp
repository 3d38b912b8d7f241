#pragma once

#include <stdexcept>
#include <string>

namespace tow {

enum class ErrorKind {
  InvalidExponent,
  InvalidArgument,
  UnsupportedDimension,
  OutOfDomain,
  NotConverged,
  MismatchedProblems,
  ExponentOutOfRange,
  DegenerateDecomposition,
  DegenerateGradient,
  SamplerStall,
  ParseError,
  UnknownKey,
  RangeError,
  IoError,
  NonFinite,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tow
