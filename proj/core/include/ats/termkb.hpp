#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ats/chat.hpp"
#include "ats/textproc.hpp"

namespace ats {
class PromptSet;
}

namespace ats::termkb {

/// The five term categories kept by the extractor.
enum class Label { Con, Malware, Tactic, Technique, Tool };

std::string_view to_string(Label label) noexcept;
std::optional<Label> label_from_string(std::string_view name);

enum class MentionSource { Lexicon, Ner };
std::string_view to_string(MentionSource source) noexcept;

struct TermMention {
  std::string surface;
  Label label = Label::Con;
  text::Span span;
  MentionSource source = MentionSource::Lexicon;

  friend bool operator==(const TermMention&, const TermMention&) = default;
};

struct LexiconEntry {
  std::string term;
  std::vector<std::string> aliases;
  std::string definition;
  std::string source;
  std::optional<Label> label;

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

LexiconEntry entry_from_json_line(std::string_view line);
std::string to_json_line(const LexiconEntry& entry);
std::vector<LexiconEntry> read_lexicon(const std::filesystem::path& path);

/// Immutable BM25 index over term, alias and definition text, plus the
/// surface-form table used for lexicon matching. Safe for concurrent reads.
class LexiconIndex {
 public:
  static constexpr double kK1 = 1.2;
  static constexpr double kB = 0.75;

  LexiconIndex() = default;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const LexiconEntry& entry(std::size_t i) const { return entries_.at(i); }
  std::span<const LexiconEntry> entries() const noexcept { return entries_; }

  /// BM25 score of every entry for the given query words (duplicates ignored).
  std::vector<double> scores(std::span<const std::string> query_words) const;
  double score(std::size_t doc, std::span<const std::string> query_words) const;
  /// Entries whose lowercased term or alias equals the normalized query.
  std::vector<std::size_t> exact_matches(std::string_view query) const;

  struct Surface {
    std::string form;  // lowercase
    std::size_t entry = 0;
  };
  /// All lowercased terms and aliases, longest first.
  std::span<const Surface> surfaces() const noexcept { return surfaces_; }

 private:
  friend LexiconIndex index_lexicon(std::vector<LexiconEntry> entries);

  struct Posting {
    std::size_t entry = 0;
    std::size_t tf = 0;
  };

  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::size_t> lengths_;
  double avg_length_ = 0.0;
  std::unordered_map<std::string, std::vector<std::size_t>> exact_;
  std::vector<Surface> surfaces_;
};

/// Validates entries (non-empty term and definition, unique canonical terms
/// compared case-insensitively) and builds the index.
LexiconIndex index_lexicon(std::vector<LexiconEntry> entries);

struct RetrievalHit {
  std::size_t entry = 0;
  double score = 0.0;
  bool exact = false;
};

/// Top-k entries: exact term/alias matches first, then BM25 score, ties by
/// canonical term. Entries with neither a match nor a positive score are dropped.
std::vector<RetrievalHit> retrieve(const LexiconIndex& index, std::string_view query, std::size_t k = 3);

struct NerMention {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;
  std::string surface;
};

class NerClient {
 public:
  virtual ~NerClient() = default;
  /// Raw model output; may carry any label. Throws Errc::NerUnavailable.
  virtual std::vector<NerMention> recognize(std::string_view text) = 0;
};

struct NerConfig {
  std::string base_url;
  std::chrono::milliseconds timeout{30000};
};

/// `POST {base_url}/ner` with `{"text": ...}`; response is an array of
/// `{start, end, label, surface}` objects.
class HttpNerClient final : public NerClient {
 public:
  explicit HttpNerClient(NerConfig config);
  std::vector<NerMention> recognize(std::string_view text) override;

 private:
  NerConfig config_;
};

enum class Strategy { Lexicon, Ner, Union };
std::string_view to_string(Strategy strategy) noexcept;
Strategy strategy_from_string(std::string_view name);

struct ExtractionResult {
  std::vector<TermMention> mentions;  // sorted by span start, non-overlapping
  std::vector<std::string> warnings;
};

class TermExtractor {
 public:
  explicit TermExtractor(const LexiconIndex& index, NerClient* ner = nullptr) : index_(&index), ner_(ner) {}

  /// Throws Errc::NerUnavailable when the NER endpoint fails.
  ExtractionResult extract(std::string_view doc, Strategy strategy) const;
  /// Like extract, but an unreachable NER endpoint degrades to lexicon
  /// matching with a recorded warning.
  ExtractionResult extract_with_fallback(std::string_view doc, Strategy strategy) const;

  std::vector<TermMention> match_lexicon(std::string_view doc) const;
  std::vector<TermMention> filter_ner(std::string_view doc, const std::vector<NerMention>& raw) const;

 private:
  const LexiconIndex* index_;
  NerClient* ner_;
};

ExtractionResult extract_terms(std::string_view doc, Strategy strategy, const LexiconIndex& index,
                               NerClient* ner = nullptr);

struct TermExplanation {
  std::string term;
  std::string explanation;
  std::vector<LexiconEntry> evidence;
  bool explained = false;
  std::string error;              // per-term failure, empty on success
  std::vector<Message> prompt;    // what the model saw, for the audit trail
};

struct ExplainOptions {
  std::size_t k = 3;
  std::size_t max_parallel = 4;
  std::string prompt_id = "explain_term.v1";
};

/// Explains each distinct mention (case-insensitive, first-occurrence order)
/// from retrieved lexicon evidence only. Terms without evidence are returned
/// unexplained and never sent to the model.
std::vector<TermExplanation> explain_terms(std::span<const TermMention> mentions, const LexiconIndex& index,
                                           ChatClient& llm, const PromptSet& prompts,
                                           const ExplainOptions& options = {});

}  // namespace ats::termkb
