#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schemakern {

enum class ErrorCode {
  CaptureError,
  SortError,
  NotANumeral,
  ActiveQuantified,
  InvalidRule,
  FuelExhausted,
  EmptySchema,
  UnknownComponent,
  MissingSubstitution,
  StuckLink,
  CheckFailed,
  NotStrict,
  MultipleActive,
  NonPaRule,
  FreshNameClash,
  NotTranslatable,
  QuantifiedCut,
  WrongEndSequentShape,
  FreeWitnessVariable,
  NonConstructorNormalForm,
  SyntaxError,
  DuplicateName,
};

inline const char *error_code_name(ErrorCode c) {
  switch (c) {
  case ErrorCode::CaptureError: return "CaptureError";
  case ErrorCode::SortError: return "SortError";
  case ErrorCode::NotANumeral: return "NotANumeral";
  case ErrorCode::ActiveQuantified: return "ActiveQuantified";
  case ErrorCode::InvalidRule: return "InvalidRule";
  case ErrorCode::FuelExhausted: return "FuelExhausted";
  case ErrorCode::EmptySchema: return "EmptySchema";
  case ErrorCode::UnknownComponent: return "UnknownComponent";
  case ErrorCode::MissingSubstitution: return "MissingSubstitution";
  case ErrorCode::StuckLink: return "StuckLink";
  case ErrorCode::CheckFailed: return "CheckFailed";
  case ErrorCode::NotStrict: return "NotStrict";
  case ErrorCode::MultipleActive: return "MultipleActive";
  case ErrorCode::NonPaRule: return "NonPaRule";
  case ErrorCode::FreshNameClash: return "FreshNameClash";
  case ErrorCode::NotTranslatable: return "NotTranslatable";
  case ErrorCode::QuantifiedCut: return "QuantifiedCut";
  case ErrorCode::WrongEndSequentShape: return "WrongEndSequentShape";
  case ErrorCode::FreeWitnessVariable: return "FreeWitnessVariable";
  case ErrorCode::NonConstructorNormalForm: return "NonConstructorNormalForm";
  case ErrorCode::SyntaxError: return "SyntaxError";
  case ErrorCode::DuplicateName: return "DuplicateName";
  }
  return "Unknown";
}

// Byte offsets into the source text plus the 1-based line/column of begin.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t line = 0;
  std::size_t column = 0;

  bool known() const { return line != 0; }
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message, SourceSpan span = {})
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code), detail_(message), span_(span) {}

  ErrorCode code() const { return code_; }
  const std::string &detail() const { return detail_; }
  const SourceSpan &span() const { return span_; }

private:
  ErrorCode code_;
  std::string detail_;
  SourceSpan span_;
};

} // namespace schemakern
