#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finqa {

/// Failure categories shared by every module. Each thrown finqa::Error carries one.
enum class Errc {
  // program syntax
  UnknownOperation,
  MalformedSyntax,
  ForwardStepRef,
  ArityViolation,
  NotANumber,
  // execution
  UnresolvedRowRef,
  BooleanInArithmetic,
  MemoryOutOfRange,
  DivisionByZero,
  RowNotFound,
  EmptyNumericRow,
  NonFiniteResult,
  TypeMismatch,
  // decoding
  InvalidToken,
  InvalidVocabulary,
  // fusion
  EmptyInput,
  EmptyGold,
  DuplicateRecordId,
  InvalidWeights,
  // numeric kernel
  DimensionMismatch,
  DegenerateRow,
  NonFiniteGradient,
  // ingestion
  IoError,
  SchemaError,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::UnknownOperation: return "UnknownOperation";
    case Errc::MalformedSyntax: return "MalformedSyntax";
    case Errc::ForwardStepRef: return "ForwardStepRef";
    case Errc::ArityViolation: return "ArityViolation";
    case Errc::NotANumber: return "NotANumber";
    case Errc::UnresolvedRowRef: return "UnresolvedRowRef";
    case Errc::BooleanInArithmetic: return "BooleanInArithmetic";
    case Errc::MemoryOutOfRange: return "MemoryOutOfRange";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::RowNotFound: return "RowNotFound";
    case Errc::EmptyNumericRow: return "EmptyNumericRow";
    case Errc::NonFiniteResult: return "NonFiniteResult";
    case Errc::TypeMismatch: return "TypeMismatch";
    case Errc::InvalidToken: return "InvalidToken";
    case Errc::InvalidVocabulary: return "InvalidVocabulary";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyGold: return "EmptyGold";
    case Errc::DuplicateRecordId: return "DuplicateRecordId";
    case Errc::InvalidWeights: return "InvalidWeights";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateRow: return "DegenerateRow";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::IoError: return "IoError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace finqa
