#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ats/chat.hpp"
#include "ats/corpus.hpp"
#include "ats/prompts.hpp"
#include "ats/termkb.hpp"
#include "ats/textproc.hpp"

namespace ats::simplify {

enum class Mode { Sentence, Document, Agent };
std::string_view to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view name);

enum class Flag { RefusalFallback, NoChange, FidelityViolation };
std::string_view to_string(Flag flag) noexcept;
Flag flag_from_string(std::string_view name);

struct AlignedSentence {
  text::Span original;  // into the record's cleaned description
  std::string simplified;

  friend bool operator==(const AlignedSentence&, const AlignedSentence&) = default;
};

struct SimplificationVersion {
  std::string cve_id;
  int round = 1;
  Mode mode = Mode::Document;
  std::string model_id;
  std::string text;
  std::optional<std::vector<AlignedSentence>> alignment;  // sentence mode only
  std::set<Flag> flags;
  std::string prompt_id;

  bool has(Flag f) const { return flags.count(f) != 0; }
  friend bool operator==(const SimplificationVersion&, const SimplificationVersion&) = default;
};

std::string to_json_line(const SimplificationVersion& version);
SimplificationVersion version_from_json_line(std::string_view line);
void write_store(std::span<const SimplificationVersion> versions, const std::filesystem::path& path);
std::vector<SimplificationVersion> read_store(const std::filesystem::path& path);

enum class FindingKind { VersionAltered, VersionMissing, IdMissing };
std::string_view to_string(FindingKind kind) noexcept;

struct FidelityFinding {
  FindingKind kind = FindingKind::VersionMissing;
  std::string original_token;
  std::optional<std::string> found_token;

  friend bool operator==(const FidelityFinding&, const FidelityFinding&) = default;
};

/// Every number-like and id-like token of the original must reappear verbatim.
/// A number-like token whose digit-ending proper prefix appears instead is
/// reported as altered (e.g. 4.3000000025 -> 4.3).
std::vector<FidelityFinding> lint_fidelity(std::string_view original, std::string_view simplified);

struct SimplifierOptions {
  std::string sentence_prompt{prompt_ids::kSimplifySentence};
  std::string document_prompt{prompt_ids::kSimplifyDocument};
  std::string support_prompt{prompt_ids::kTermSupport};
  std::string round2_prompt{prompt_ids::kRound2};
};

/// Drives one chat client through the sentence, document and round-2 flows.
/// Calls for a single document are sequential; distinct documents may be
/// simplified concurrently if the client tolerates it.
class Simplifier {
 public:
  Simplifier(ChatClient& client, const PromptSet& prompts, SimplifierOptions options = {});

  /// One chat call per sentence of the cleaned description. Refused sentences
  /// are replaced by the original sentence and the version is flagged.
  SimplificationVersion simplify_sentencewise(const corpus::CveRecord& record);

  /// The outgoing conversation for document mode. With explanations (even an
  /// empty list) the term-support block is rendered from the explained items.
  std::vector<Message> build_document_request(
      const corpus::CveRecord& record,
      std::optional<std::span<const termkb::TermExplanation>> explanations = std::nullopt) const;

  /// Document mode without explanations, agent mode with them. A refusal keeps
  /// the whole original text.
  SimplificationVersion simplify_document(
      const corpus::CveRecord& record,
      std::optional<std::span<const termkb::TermExplanation>> explanations = std::nullopt);

  /// Round-2 package: system turn = round-1 prompt; user turn = improvement
  /// instructions, original CVE, round-1 simplification, reviewer comments.
  std::vector<Message> build_round2_request(const corpus::CveRecord& record, const SimplificationVersion& v1,
                                            std::span<const std::string> comments) const;

  SimplificationVersion resimplify(const corpus::CveRecord& record, const SimplificationVersion& v1,
                                   std::span<const std::string> comments);

  ChatClient& client() { return *client_; }
  const PromptSet& prompts() const { return *prompts_; }

 private:
  void finish(const corpus::CveRecord& record, SimplificationVersion& version) const;

  ChatClient* client_;
  const PromptSet* prompts_;
  SimplifierOptions options_;
};

inline constexpr std::string_view kNoReviewerComments = "No reviewer comments.";

struct AgentAudit {
  std::string cve_id;
  std::vector<termkb::TermMention> mentions;
  std::vector<termkb::TermExplanation> explanations;
  std::vector<Message> simplification_prompt;
  std::vector<std::string> warnings;
};

std::string to_json_line(const AgentAudit& audit);

struct AgentResult {
  SimplificationVersion version;
  AgentAudit audit;
};

struct AgentOptions {
  termkb::Strategy strategy = termkb::Strategy::Lexicon;
  termkb::ExplainOptions explain;
};

/// Term extraction, grounded explanation, then document simplification with
/// the explanations as support. NER failures degrade to lexicon matching.
AgentResult run_agent_pipeline(const corpus::CveRecord& record, const termkb::TermExtractor& extractor,
                               const termkb::LexiconIndex& index, Simplifier& simplifier,
                               const AgentOptions& options = {});

}  // namespace ats::simplify
