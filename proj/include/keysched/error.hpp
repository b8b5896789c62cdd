#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace keysched {

enum class ErrorCode {
  EmptyDirectory,
  MalformedPgm,
  DimensionMismatch,
  UnsupportedEncoding,
  UnsupportedChannels,
  UnsupportedRate,
  ParseError,
  InvariantViolation,
  IoError,
  TooSmall,
  TooShort,
  InvalidWindow,
  NotNormalized,
  BadInterval,
  InvalidK,
  InconsistentExtrema,
  WrongSampleRate,
  KernelTooLarge,
  IndexOutOfRange,
  ShapeMismatch,
  CountMismatch,
  BadGeometry,
  OddDim,
  NoValidInstances,
  NotDivisibleByThree,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace keysched
