#include "geotax/error.hpp"

namespace geotax {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::SaturatedTooEarly: return "SaturatedTooEarly";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::BadSymbol: return "BadSymbol";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::AlphabetTooSmall: return "AlphabetTooSmall";
    case ErrorCode::BadBase: return "BadBase";
    case ErrorCode::BadResidue: return "BadResidue";
    case ErrorCode::TargetTooShort: return "TargetTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooFewFeatures: return "TooFewFeatures";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::RegionTooSmall: return "RegionTooSmall";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::DegenerateGap: return "DegenerateGap";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::TooManyAmbiguous: return "TooManyAmbiguous";
    case ErrorCode::RangeUnavailable: return "RangeUnavailable";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::HttpError:
    case ErrorCode::RangeUnavailable:
      return 4;
    default:
      return 3;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace geotax
