#pragma once

#include <stdexcept>
#include <string>

namespace soibart {

// Every failure the library reports deliberately. Codes let tests assert the
// exact failure without string matching.
enum class ErrorCode {
  MalformedLine,
  NonConsecutiveYears,
  InteriorGap,
  Empty,
  MissingHeader,
  UnsortedRows,
  OutOfRange,
  SeriesTooShort,
  DegenerateSplit,
  LengthMismatch,
  ConstantActuals,
  EmptyInput,
  DimensionMismatch,
  TooFewRows,
  ConstantTarget,
  RankDeficient,
  LagTooLarge,
  ConstantSeries,
  TooShort,
  UnknownPreset,
  InvalidConfig,
  IoError,
  BadSnapshot,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NonConsecutiveYears: return "NonConsecutiveYears";
    case ErrorCode::InteriorGap: return "InteriorGap";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::UnsortedRows: return "UnsortedRows";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ConstantActuals: return "ConstantActuals";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ConstantTarget: return "ConstantTarget";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadSnapshot: return "BadSnapshot";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace soibart
