#include "keysched/error.hpp"

namespace keysched {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDirectory: return "EmptyDirectory";
    case ErrorCode::MalformedPgm: return "MalformedPgm";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::UnsupportedChannels: return "UnsupportedChannels";
    case ErrorCode::UnsupportedRate: return "UnsupportedRate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InconsistentExtrema: return "InconsistentExtrema";
    case ErrorCode::WrongSampleRate: return "WrongSampleRate";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::BadGeometry: return "BadGeometry";
    case ErrorCode::OddDim: return "OddDim";
    case ErrorCode::NoValidInstances: return "NoValidInstances";
    case ErrorCode::NotDivisibleByThree: return "NotDivisibleByThree";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace keysched
