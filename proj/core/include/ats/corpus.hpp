#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ats::corpus {

enum class Split { Unassigned, Eval, Dev };

std::string_view to_string(Split split) noexcept;
Split split_from_string(std::string_view name);

struct RemovedSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string reason;

  friend bool operator==(const RemovedSpan&, const RemovedSpan&) = default;
};

struct CveRecord {
  std::string id;
  std::string raw_description;
  std::string cleaned_description;
  std::vector<RemovedSpan> removed_spans;
  Split split = Split::Unassigned;
  std::string source_path;

  friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

struct Corpus {
  std::vector<CveRecord> records;
  std::uint64_t seed = 0;

  const CveRecord* find(std::string_view id) const;
};

/// `CVE-<4 digits>-<4+ digits>`.
bool is_valid_cve_id(std::string_view id);

/// Parses one CVElistV5 record document. Fresh records have
/// cleaned_description == raw_description and no removed spans.
CveRecord parse_cve_record(std::string_view json_text, std::string source_path = {});

/// Reason labels used by the automatic cleaner.
inline constexpr std::string_view kReasonSymbolRatio = "symbol-ratio";
inline constexpr std::string_view kReasonLogPattern = "log-pattern";

/// Share of characters in `line` that are neither alphabetic nor whitespace.
double symbol_ratio(std::string_view line);

/// Excises non-natural-language lines. With `overrides`, those spans replace
/// the automatic classification entirely.
CveRecord clean_description(const CveRecord& record,
                            const std::optional<std::vector<RemovedSpan>>& overrides = std::nullopt);

/// `raw` with every span cut out; spans must be sorted, disjoint and in bounds.
std::string excise(std::string_view raw, const std::vector<RemovedSpan>& spans);

/// Deterministic seed-keyed shuffle; the first eval_n shuffled records become
/// eval, the next dev_n dev, the rest unassigned. Record order is preserved.
Corpus partition_corpus(const Corpus& corpus, std::size_t eval_n, std::size_t dev_n, std::uint64_t seed);

// JSON-lines persistence.
std::string to_json_line(const CveRecord& record);
CveRecord record_from_json_line(std::string_view line);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_corpus(const std::filesystem::path& path);

struct SpanOverride {
  std::string id;
  std::vector<RemovedSpan> spans;
};
std::vector<SpanOverride> read_overrides(const std::filesystem::path& path);

struct IngestResult {
  Corpus corpus;
  std::vector<std::string> skipped;  // "path: reason"
};

/// Walks a CVElistV5 tree for *.json records in sorted path order.
/// Unparseable records are skipped and reported; duplicate ids are an error.
IngestResult ingest_directory(const std::filesystem::path& root);

}  // namespace ats::corpus
