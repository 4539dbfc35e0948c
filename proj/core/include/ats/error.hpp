#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ats {

enum class Errc {
  // corpus
  MalformedDocument,
  MissingId,
  InvalidId,
  NoEnglishDescription,
  EmptyDescription,
  InvalidSpan,
  NotEnoughRecords,
  DuplicateId,
  // metrics
  EmptyReference,
  NoWords,
  EmptySequence,
  ProviderFailure,
  EmptyInput,
  MismatchedColumns,
  // termkb
  DuplicateTerm,
  InvalidEntry,
  NerUnavailable,
  LlmUnavailable,
  // simplifier
  Transport,
  BadStatus,
  MalformedResponse,
  InvalidMessages,
  WrongRound,
  TemplateError,
  // review
  UnknownRound,
  RoundExists,
  RoundClosed,
  RoundOpen,
  UnknownTask,
  IncompleteAnswers,
  AcceptedDocIncluded,
  InvalidRound,
  // cli / io
  ConfigError,
  IoError,
  UnknownCommand,
};

std::string_view to_string(Errc code) noexcept;

/// Every library failure is reported as an ats::Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ats
