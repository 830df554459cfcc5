#pragma once

#include <stdexcept>
#include <string>

namespace geotax {

enum class ErrorCode {
  InvalidArgument,
  ZeroNormRow,
  DegenerateInput,
  RankDeficient,
  BadMagic,
  TruncatedFile,
  DimensionMismatch,
  ParseError,
  IoError,
  DegenerateRange,
  BlowUp,
  SaturatedTooEarly,
  TooFewPoints,
  BadSymbol,
  SingularFit,
  AlphabetTooSmall,
  BadBase,
  BadResidue,
  TargetTooShort,
  LengthMismatch,
  TooFewSamples,
  TooFewFeatures,
  ShapeMismatch,
  SingleClass,
  RegionTooSmall,
  TooShort,
  NonFiniteLoss,
  DegenerateGap,
  MalformedHeader,
  MalformedRecord,
  ConfigError,
  HttpError,
  TooManyAmbiguous,
  RangeUnavailable,
};

const char* to_string(ErrorCode code);

// Process exit code for the CLI: 2 config, 3 data, 4 network.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace geotax
