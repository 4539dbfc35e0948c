#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ats/corpus.hpp"
#include "ats/simplifier.hpp"

namespace ats::review {

enum class Answer { Agree, Neutral, Disagree };
std::string_view to_string(Answer answer) noexcept;
/// Accepts "agree", "neutral", "disagree" and "neither agree nor disagree".
Answer answer_from_string(std::string_view name);

enum class AppliesTo { V1, V2, Comparison };
std::string_view to_string(AppliesTo target) noexcept;
AppliesTo applies_to_from_string(std::string_view name);

struct Statement {
  std::string id;
  std::string text;
  AppliesTo applies_to = AppliesTo::V1;
  bool decisive = true;  // counted by the acceptance rule

  friend bool operator==(const Statement&, const Statement&) = default;
};

inline constexpr std::string_view kEasierText = "The simplification is easier to understand than the original";
inline constexpr std::string_view kMeaningText = "The simplification preserves the meaning of the original text";
inline constexpr std::string_view kComparisonText = "The second round simplification is of better quality than the first";

/// Round 1: the two statements about the simplification. Later rounds ask
/// both about v1 and v2 and add the comparison; only the v2 pair is decisive.
std::vector<Statement> default_statements(int round);

struct ShownVersion {
  std::string label;       // "v1", "v2"
  std::string version_id;  // e.g. "CVE-2025-0001/r1"
  std::string text;

  friend bool operator==(const ShownVersion&, const ShownVersion&) = default;
};

struct Task {
  std::string cve_id;
  std::string original;
  std::vector<ShownVersion> versions;

  friend bool operator==(const Task&, const Task&) = default;
};

/// Pairs records with their versions by cve id. Round 1 takes only `v1`;
/// later rounds require both. Throws UnknownTask when a version is missing.
std::vector<Task> make_tasks(std::span<const corpus::CveRecord> records,
                             std::span<const simplify::SimplificationVersion> v1,
                             std::span<const simplify::SimplificationVersion> v2 = {});

struct SurveyResponse {
  std::string reviewer_id;
  std::string cve_id;
  int round = 1;
  std::map<std::string, Answer> answers;
  std::optional<std::string> comment;
  std::string submitted_at;

  friend bool operator==(const SurveyResponse&, const SurveyResponse&) = default;
};

struct StatementTally {
  std::string statement_id;
  std::size_t agree = 0;
  std::size_t neutral = 0;
  std::size_t disagree = 0;

  std::size_t total() const noexcept { return agree + neutral + disagree; }
  /// agree / total, neutral answers included in the denominator; 0 when empty.
  double agree_fraction() const noexcept;
};

/// Strictly more than 80% agree and no disagree on every tally. An empty
/// tally never passes.
bool passes(std::span<const StatementTally> decisive);

struct AcceptanceDecision {
  std::string cve_id;
  int round = 1;
  bool accepted = false;
  std::vector<StatementTally> statements;  // every statement of the round
  std::size_t response_count = 0;
};

enum class RoundStatus { Open, Closed };
std::string_view to_string(RoundStatus status) noexcept;

struct SurveyRound {
  int number = 1;
  RoundStatus status = RoundStatus::Open;
  std::vector<Statement> statements;
  std::vector<Task> tasks;
  std::string created_at;
  std::string closed_at;

  const Task* find(std::string_view cve_id) const;
};

struct CloseResult {
  std::vector<AcceptanceDecision> decisions;
  std::vector<std::string> warnings;
  std::map<std::string, std::vector<std::string>> comments;  // cve -> comments, reviewer order
};

struct RoundExport {
  std::string csv;
  std::map<std::string, std::string> comments;  // cve -> comment file body
};

/// Writes `round{n}_decisions.csv` and `comments/{cve}.txt` under `dir`.
void write_export(const RoundExport& report, int round, const std::filesystem::path& dir);

/// Survey state derived from an append-only JSON-lines event log
/// ({ts, kind, payload}; kinds round_created, response_submitted,
/// round_closed). Writers are serialized; readers take a shared lock.
class ReviewStore {
 public:
  using Clock = std::function<std::string()>;

  /// Replays `log_path` if it exists. An empty path keeps the log in memory only.
  explicit ReviewStore(std::filesystem::path log_path = {}, Clock clock = {});

  SurveyRound create_round(int number, std::vector<Task> tasks, std::optional<std::vector<Statement>> statements = {});
  /// Latest submission per (reviewer, cve, round) wins.
  SurveyResponse submit_response(SurveyResponse response);
  CloseResult close_round(int number);
  RoundExport export_round(int number) const;

  std::vector<SurveyRound> rounds() const;
  SurveyRound round(int number) const;
  /// Current responses for a round, ordered by cve then reviewer.
  std::vector<SurveyResponse> responses(int number) const;
  std::vector<AcceptanceDecision> decisions(int number) const;
  std::map<std::string, std::vector<std::string>> comments(int number) const;
  /// Canonical serialization of the derived state, for replay comparison.
  std::string state_json() const;
  std::vector<std::string> log_lines() const;

 private:
  struct RoundState {
    SurveyRound round;
    std::map<std::pair<std::string, std::string>, SurveyResponse> responses;  // (cve, reviewer)
  };

  void apply(const std::string& line);
  void record(std::string_view kind, const std::string& payload_json);
  const RoundState& state(int number) const;
  std::vector<AcceptanceDecision> decide(const RoundState& state) const;

  std::filesystem::path log_path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::map<int, RoundState> rounds_;
  std::vector<std::string> log_;
};

/// ISO-8601 UTC wall-clock timestamp with second precision.
std::string utc_timestamp();

}  // namespace ats::review
