#pragma once

#include <stdexcept>
#include <string>

namespace gk {

enum class ErrorCode {
  NoValidJoints,
  OutOfRange,
  EmptySequence,
  NonMonotonicFrames,
  TooFewSamples,
  DimensionMismatch,
  EmptyInput,
  DegenerateLabels,
  UnknownClass,
  EmptyScores,
  SingleClassLabels,
  NonMonotonicTime,
  ModelMismatch,
  NonFiniteCost,
  NoCommonJoints,
  LengthMismatch,
  ParseError,
  LayoutMismatch,
  MalformedHeader,
  TruncatedFile,
  VersionUnsupported,
  DigestMismatch,
  ConfigError,
  GridTooLarge,
  InvalidArgument,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoValidJoints: return "NoValidJoints";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::SingleClassLabels: return "SingleClassLabels";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::NonFiniteCost: return "NonFiniteCost";
    case ErrorCode::NoCommonJoints: return "NoCommonJoints";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace gk
