#include "ats/error.hpp"

namespace ats {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::MissingId: return "MissingId";
    case Errc::InvalidId: return "InvalidId";
    case Errc::NoEnglishDescription: return "NoEnglishDescription";
    case Errc::EmptyDescription: return "EmptyDescription";
    case Errc::InvalidSpan: return "InvalidSpan";
    case Errc::NotEnoughRecords: return "NotEnoughRecords";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::EmptyReference: return "EmptyReference";
    case Errc::NoWords: return "NoWords";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::ProviderFailure: return "ProviderFailure";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MismatchedColumns: return "MismatchedColumns";
    case Errc::DuplicateTerm: return "DuplicateTerm";
    case Errc::InvalidEntry: return "InvalidEntry";
    case Errc::NerUnavailable: return "NerUnavailable";
    case Errc::LlmUnavailable: return "LlmUnavailable";
    case Errc::Transport: return "Transport";
    case Errc::BadStatus: return "BadStatus";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::InvalidMessages: return "InvalidMessages";
    case Errc::WrongRound: return "WrongRound";
    case Errc::TemplateError: return "TemplateError";
    case Errc::UnknownRound: return "UnknownRound";
    case Errc::RoundExists: return "RoundExists";
    case Errc::RoundClosed: return "RoundClosed";
    case Errc::RoundOpen: return "RoundOpen";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::IncompleteAnswers: return "IncompleteAnswers";
    case Errc::AcceptedDocIncluded: return "AcceptedDocIncluded";
    case Errc::InvalidRound: return "InvalidRound";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
    case Errc::UnknownCommand: return "UnknownCommand";
  }
  return "Unknown";
}

}  // namespace ats
