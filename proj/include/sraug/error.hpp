#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sraug {

enum class ErrorCode {
  InvalidArgument,
  IoFailure,
  MalformedContainer,
  UnsupportedFormat,
  ConfigMismatch,
  DegenerateWindowSum,
  InputTooShort,
  DegenerateVariance,
  InsufficientVoicedOverlap,
  DimensionMismatch,
  NonFinite,
  VocoderProcessFailure,
  VocoderOutputMissing,
  EmptyCorpus,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit. The code is stable and meant for
/// programmatic handling; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sraug
