#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deckforge {

enum class ErrorCode {
  // docmodel
  EmptyInput,
  NoSectionsFound,
  InvalidUtf8,
  IndexOutOfRange,
  // textcore
  EmptyCorpus,
  FileMissing,
  MalformedHeader,
  DimensionMismatch,
  NonFiniteValue,
  KTooLarge,
  EmptyPoints,
  // summarize
  NonSquare,
  NegativeWeight,
  InvalidConfig,
  // deckgen
  SummarySectionMismatch,
  DeckTooLarge,
  MalformedDeck,
  IoError,
  // audio
  TooShort,
  BadRange,
  NonNegativeViolation,
  EmptyText,
  Timeout,
  HttpStatus,
  MalformedResponse,
  ServiceUnreachable,
  // pipeline
  UnpairedDocument,
  ManifestMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries an ErrorCode so callers can
/// map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 protected:
  struct Preformatted {};
  Error(Preformatted, ErrorCode code, const std::string& message, const std::string& detail);

 private:
  ErrorCode code_;
  std::string detail_;
};

/// An Error annotated with the pipeline stage it escaped from.
/// what() reads "<stage>: <CodeName>: <detail>".
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner);

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace deckforge
