#include "sraug/error.hpp"

namespace sraug {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::DegenerateWindowSum: return "DegenerateWindowSum";
    case ErrorCode::InputTooShort: return "InputTooShort";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InsufficientVoicedOverlap: return "InsufficientVoicedOverlap";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::VocoderProcessFailure: return "VocoderProcessFailure";
    case ErrorCode::VocoderOutputMissing: return "VocoderOutputMissing";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
  }
  return "Unknown";
}

}  // namespace sraug
