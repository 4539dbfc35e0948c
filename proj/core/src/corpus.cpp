#include "ats/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <regex>
#include <unordered_set>

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/textproc.hpp"

namespace ats::corpus {
namespace {

using nlohmann::json;

constexpr double kSymbolRatioThreshold = 0.4;

const std::regex& log_line_pattern() {
  static const std::regex re(
      R"(^\s*\[?\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2})"       // ISO timestamp
      R"(|^\s*\[?\d{2}:\d{2}:\d{2})"                       // clock prefix
      R"(|^\s*[A-Z][a-z]{2} +\d{1,2} \d{2}:\d{2}:\d{2})"  // syslog
      R"(|^\s*at [A-Za-z_$][\w$.<>]*\()"                   // java frame
      R"(|^\s*>>>)"
      R"(|^\s*(0x)?[0-9a-fA-F]{4,16}:\s+([0-9a-fA-F]{2}\s+){4,})"  // offset-prefixed hexdump
      R"(|(\b[0-9a-fA-F]{2}\b\s+){8,})",                             // bare byte run
      std::regex::optimize);
  return re;
}

void validate_spans(const std::vector<RemovedSpan>& spans, std::size_t size) {
  std::size_t cursor = 0;
  for (const auto& s : spans) {
    if (s.start > s.end || s.end > size) {
      throw Error(Errc::InvalidSpan, "span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                                         ") out of bounds for length " + std::to_string(size));
    }
    if (s.start < cursor) throw Error(Errc::InvalidSpan, "spans overlap or are unsorted");
    cursor = s.end;
  }
}

json spans_to_json(const std::vector<RemovedSpan>& spans) {
  json arr = json::array();
  for (const auto& s : spans) arr.push_back(json::array({s.start, s.end, s.reason}));
  return arr;
}

std::vector<RemovedSpan> spans_from_json(const json& arr) {
  std::vector<RemovedSpan> spans;
  if (!arr.is_array()) throw Error(Errc::MalformedDocument, "spans must be an array");
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 3) throw Error(Errc::MalformedDocument, "span must be [start,end,reason]");
    spans.push_back({item[0].get<std::size_t>(), item[1].get<std::size_t>(), item[2].get<std::string>()});
  }
  return spans;
}

}  // namespace

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Eval: return "eval";
    case Split::Dev: return "dev";
    case Split::Unassigned: return "unassigned";
  }
  return "unassigned";
}

Split split_from_string(std::string_view name) {
  if (name == "eval") return Split::Eval;
  if (name == "dev") return Split::Dev;
  if (name == "unassigned") return Split::Unassigned;
  throw Error(Errc::MalformedDocument, "unknown split '" + std::string(name) + "'");
}

const CveRecord* Corpus::find(std::string_view id) const {
  auto it = std::find_if(records.begin(), records.end(), [&](const CveRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

bool is_valid_cve_id(std::string_view id) {
  static const std::regex re(R"(CVE-\d{4}-\d{4,})");
  return std::regex_match(id.begin(), id.end(), re);
}

CveRecord parse_cve_record(std::string_view json_text, std::string source_path) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(Errc::MalformedDocument, "record is not a JSON object");

  const json* id = nullptr;
  if (auto meta = doc.find("cveMetadata"); meta != doc.end() && meta->is_object()) {
    if (auto it = meta->find("cveId"); it != meta->end() && it->is_string()) id = &*it;
  }
  if (id == nullptr) throw Error(Errc::MissingId, "no cveMetadata.cveId");
  const auto cve_id = id->get<std::string>();
  if (!is_valid_cve_id(cve_id)) throw Error(Errc::InvalidId, "'" + cve_id + "' is not a CVE identifier");

  const json* descriptions = nullptr;
  if (auto c = doc.find("containers"); c != doc.end() && c->is_object()) {
    if (auto cna = c->find("cna"); cna != c->end() && cna->is_object()) {
      if (auto d = cna->find("descriptions"); d != cna->end() && d->is_array()) descriptions = &*d;
    }
  }
  if (descriptions != nullptr) {
    for (const auto& entry : *descriptions) {
      if (!entry.is_object()) continue;
      auto lang = entry.find("lang");
      auto value = entry.find("value");
      if (lang == entry.end() || !lang->is_string() || value == entry.end() || !value->is_string()) continue;
      if (!text::to_lower_ascii(lang->get<std::string>()).starts_with("en")) continue;
      CveRecord rec;
      rec.id = cve_id;
      rec.raw_description = value->get<std::string>();
      rec.cleaned_description = rec.raw_description;
      rec.source_path = std::move(source_path);
      return rec;
    }
  }
  throw Error(Errc::NoEnglishDescription, cve_id + " has no English description");
}

double symbol_ratio(std::string_view line) {
  if (line.empty()) return 0.0;
  std::size_t symbols = 0;
  for (char ch : line) {
    const auto c = static_cast<unsigned char>(ch);
    // Bytes >= 0x80 belong to UTF-8 letters far more often than to symbols.
    if (c >= 0x80 || std::isalpha(c) || text::is_space(ch)) continue;
    ++symbols;
  }
  return static_cast<double>(symbols) / static_cast<double>(line.size());
}

std::string excise(std::string_view raw, const std::vector<RemovedSpan>& spans) {
  validate_spans(spans, raw.size());
  std::string out;
  out.reserve(raw.size());
  std::size_t cursor = 0;
  for (const auto& s : spans) {
    out.append(raw.substr(cursor, s.start - cursor));
    cursor = s.end;
  }
  out.append(raw.substr(cursor));
  return out;
}

CveRecord clean_description(const CveRecord& record, const std::optional<std::vector<RemovedSpan>>& overrides) {
  if (record.raw_description.empty()) throw Error(Errc::EmptyDescription, record.id + " has an empty description");

  CveRecord out = record;
  const std::string_view raw = record.raw_description;
  if (overrides) {
    out.removed_spans = *overrides;
  } else {
    out.removed_spans.clear();
    std::size_t line_start = 0;
    while (line_start < raw.size()) {
      std::size_t nl = raw.find('\n', line_start);
      const std::size_t line_end = nl == std::string_view::npos ? raw.size() : nl;
      const std::size_t span_end = nl == std::string_view::npos ? raw.size() : nl + 1;
      std::string_view line = raw.substr(line_start, line_end - line_start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

      if (!text::trim(line).empty()) {
        if (symbol_ratio(line) > kSymbolRatioThreshold) {
          out.removed_spans.push_back({line_start, span_end, std::string(kReasonSymbolRatio)});
        } else if (std::regex_search(line.begin(), line.end(), log_line_pattern())) {
          out.removed_spans.push_back({line_start, span_end, std::string(kReasonLogPattern)});
        }
      }
      line_start = span_end;
    }
  }
  out.cleaned_description = excise(raw, out.removed_spans);
  return out;
}

Corpus partition_corpus(const Corpus& corpus, std::size_t eval_n, std::size_t dev_n, std::uint64_t seed) {
  const std::size_t n = corpus.records.size();
  if (eval_n + dev_n > n) {
    throw Error(Errc::NotEnoughRecords, "requested " + std::to_string(eval_n + dev_n) + " records but corpus has " +
                                            std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Explicit Fisher-Yates over raw engine output: std::shuffle's algorithm
  // differs between standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }

  Corpus out = corpus;
  out.seed = seed;
  for (auto& r : out.records) r.split = Split::Unassigned;
  for (std::size_t k = 0; k < eval_n + dev_n; ++k) {
    out.records[order[k]].split = k < eval_n ? Split::Eval : Split::Dev;
  }
  return out;
}

std::string to_json_line(const CveRecord& record) {
  json j = json::object();
  j["id"] = record.id;
  j["raw"] = record.raw_description;
  j["cleaned"] = record.cleaned_description;
  j["removed_spans"] = spans_to_json(record.removed_spans);
  j["split"] = std::string(to_string(record.split));
  j["source_path"] = record.source_path;
  return j.dump();
}

CveRecord record_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    CveRecord rec;
    rec.id = j.at("id").get<std::string>();
    if (!is_valid_cve_id(rec.id)) throw Error(Errc::InvalidId, "'" + rec.id + "' is not a CVE identifier");
    rec.raw_description = j.at("raw").get<std::string>();
    rec.cleaned_description = j.value("cleaned", rec.raw_description);
    if (auto it = j.find("removed_spans"); it != j.end()) rec.removed_spans = spans_from_json(*it);
    rec.split = split_from_string(j.value("split", std::string("unassigned")));
    rec.source_path = j.value("source_path", std::string());
    return rec;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedDocument, e.what());
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += to_json_line(r);
    out += '\n';
  }
  io::write_file(path, out);
}

Corpus read_corpus(const std::filesystem::path& path) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& line : io::read_lines(path)) {
    auto rec = record_from_json_line(line);
    if (!seen.insert(rec.id).second) throw Error(Errc::DuplicateId, rec.id + " appears twice in " + path.string());
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

std::vector<SpanOverride> read_overrides(const std::filesystem::path& path) {
  std::vector<SpanOverride> out;
  for (const auto& line : io::read_lines(path)) {
    try {
      const json j = json::parse(line);
      out.push_back({j.at("id").get<std::string>(), spans_from_json(j.at("spans"))});
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedDocument, std::string("override line: ") + e.what());
    }
  }
  return out;
}

IngestResult ingest_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error(Errc::IoError, root.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  std::unordered_set<std::string> seen;
  for (const auto& file : files) {
    const auto rel = fs::relative(file, root).generic_string();
    try {
      auto rec = parse_cve_record(io::read_file(file), rel);
      if (!seen.insert(rec.id).second) throw Error(Errc::DuplicateId, rec.id + " found again in " + rel);
      result.corpus.records.push_back(std::move(rec));
    } catch (const Error& e) {
      if (e.code() == Errc::DuplicateId) throw;
      result.skipped.push_back(rel + ": " + e.what());
    }
  }
  return result;
}

}  // namespace ats::corpus
