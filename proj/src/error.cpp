#include "deckforge/error.hpp"

namespace deckforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoSectionsFound: return "NoSectionsFound";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyPoints: return "EmptyInput";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SummarySectionMismatch: return "SummarySectionMismatch";
    case ErrorCode::DeckTooLarge: return "DeckTooLarge";
    case ErrorCode::MalformedDeck: return "MalformedDeck";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::NonNegativeViolation: return "NonNegativeViolation";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::HttpStatus: return "HttpStatus";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ServiceUnreachable: return "ServiceUnreachable";
    case ErrorCode::UnpairedDocument: return "UnpairedDocument";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& detail) {
  std::string msg(to_string(code));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(format_message(code, detail)), code_(code), detail_(detail) {}

Error::Error(Preformatted, ErrorCode code, const std::string& message, const std::string& detail)
    : std::runtime_error(message), code_(code), detail_(detail) {}

StageError::StageError(std::string stage, const Error& inner)
    : Error(Preformatted{}, inner.code(), stage + ": " + inner.what(), inner.detail()),
      stage_(std::move(stage)) {}

}  // namespace deckforge
