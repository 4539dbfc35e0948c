#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ats/embedding.hpp"
#include "ats/textproc.hpp"

namespace ats::termkb {
class TermExtractor;
enum class Strategy;
}  // namespace ats::termkb

namespace ats::metrics {

/// SARI operation scores, averaged uniformly over n-gram orders 1..max_n.
struct SariBreakdown {
  double f_keep = 0.0;
  double f_add = 0.0;
  double p_del = 0.0;
};

/// Per-order scores for a single n.
SariBreakdown sari_order(const text::NGramCounts& input, const text::NGramCounts& output,
                         const text::NGramCounts& reference);

SariBreakdown sari_components(const std::vector<std::string>& input, const std::vector<std::string>& output,
                              const std::vector<std::string>& reference, std::size_t max_n = 4);
SariBreakdown sari_components(const text::TokenSequence& input, const text::TokenSequence& output,
                              const text::TokenSequence& reference, std::size_t max_n = 4);

struct DsariResult {
  double d_keep = 0.0;
  double d_add = 0.0;
  double d_del = 0.0;
  double d_sari = 0.0;
  double lp = 1.0;   // token-length penalty
  double slp = 1.0;  // sentence-count penalty
  SariBreakdown sari;
};

/// A text with its tokenization and sentence split precomputed.
struct Document {
  std::string text;
  text::TokenSequence tokens;
  text::SentenceSplit sentences;

  static Document from(std::string_view text);
};

DsariResult dsari(const Document& input, const Document& output, const Document& reference, std::size_t max_n = 4);
DsariResult dsari(std::string_view input, std::string_view output, std::string_view reference, std::size_t max_n = 4);

struct ReadabilityStats {
  double fkgl = 0.0;
  double asl = 0.0;
  double asw = 0.0;
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
  std::size_t syllable_count = 0;
};

ReadabilityStats readability(std::string_view doc_text);

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Greedy max-cosine token matching; no IDF weighting, no baseline rescaling.
BertScoreResult bertscore(std::span<const std::string> candidate, std::span<const std::string> reference,
                          EmbeddingProvider& provider);
/// Tokenizes both texts and scores their non-punctuation tokens.
BertScoreResult bertscore_text(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider);

double semantic_similarity(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider);

struct NeStats {
  std::vector<std::size_t> counts;
  double mean = 0.0;
};

NeStats ne_stats(std::span<const std::string> docs, const termkb::TermExtractor& extractor,
                 termkb::Strategy strategy);

// Report columns. Tables group them as reference-based / meaning / simplicity.
namespace column {
inline constexpr std::string_view kDsari = "d_sari";
inline constexpr std::string_view kDkeep = "d_keep";
inline constexpr std::string_view kDadd = "d_add";
inline constexpr std::string_view kDdel = "d_del";
inline constexpr std::string_view kBertP = "bertscore_p";
inline constexpr std::string_view kBertR = "bertscore_r";
inline constexpr std::string_view kBertF1 = "bertscore_f1";
inline constexpr std::string_view kSemSim = "semantic_similarity";
inline constexpr std::string_view kFkgl = "fkgl";
inline constexpr std::string_view kWords = "words";
inline constexpr std::string_view kSentences = "sentences";
inline constexpr std::string_view kSyllablesPerWord = "syllables_per_word";
inline constexpr std::string_view kNamedEntities = "named_entities";
}  // namespace column

/// Canonical column order used by every emitter.
std::span<const std::string_view> canonical_columns();

struct DocumentRow {
  std::string id;
  std::vector<std::pair<std::string, double>> values;

  void set(std::string_view column, double value);
};

struct SystemSummary {
  std::string system;
  std::size_t documents = 0;
  std::vector<std::pair<std::string, double>> means;

  const double* find(std::string_view column) const;
};

struct MetricReport {
  std::string system;
  std::vector<std::string> columns;
  std::vector<DocumentRow> rows;
  std::vector<double> means;  // parallel to columns

  SystemSummary summary() const;
};

/// Column-wise arithmetic means. Every row must carry the same columns.
MetricReport aggregate_report(std::string system, std::vector<DocumentRow> rows);

std::string documents_csv(const MetricReport& report);
std::string systems_csv(std::span<const SystemSummary> systems);
std::vector<SystemSummary> parse_systems_csv(std::string_view csv);
/// Three Markdown tables: reference-based, meaning preservation, simplicity.
std::string systems_markdown(std::span<const SystemSummary> systems);

}  // namespace ats::metrics
