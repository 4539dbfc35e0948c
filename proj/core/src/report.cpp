#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/metrics.hpp"

namespace ats::metrics {
namespace {

constexpr std::array<std::string_view, 13> kCanonical = {
    column::kDsari, column::kDkeep,    column::kDadd,      column::kDdel,
    column::kBertP, column::kBertR,    column::kBertF1,    column::kSemSim,
    column::kFkgl,  column::kWords,    column::kSentences, column::kSyllablesPerWord,
    column::kNamedEntities,
};

std::size_t canonical_rank(std::string_view name) {
  auto it = std::find(kCanonical.begin(), kCanonical.end(), name);
  return static_cast<std::size_t>(it - kCanonical.begin());
}

void sort_columns(std::vector<std::string>& columns) {
  std::stable_sort(columns.begin(), columns.end(),
                   [](const std::string& a, const std::string& b) { return canonical_rank(a) < canonical_rank(b); });
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

struct TableColumn {
  std::string_view key;
  std::string_view title;
};

void markdown_table(std::ostringstream& out, std::string_view heading, std::span<const TableColumn> cols,
                    std::span<const SystemSummary> systems) {
  out << "## " << heading << "\n\n| Model |";
  for (const auto& c : cols) out << ' ' << c.title << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << "---|";
  out << '\n';
  std::size_t rows = 0;
  for (const auto& sys : systems) {
    const bool any = std::any_of(cols.begin(), cols.end(), [&](const TableColumn& c) { return sys.find(c.key); });
    if (!any) continue;
    ++rows;
    out << "| " << sys.system << " |";
    for (const auto& c : cols) {
      const double* v = sys.find(c.key);
      out << ' ' << (v ? io::format_fixed(*v, 2) : std::string("n/a")) << " |";
    }
    out << '\n';
  }
  if (rows == 0) {
    out << "| (none) |";
    for (std::size_t i = 0; i < cols.size(); ++i) out << " n/a |";
    out << '\n';
  }
  out << '\n';
}

}  // namespace

std::span<const std::string_view> canonical_columns() { return kCanonical; }

void DocumentRow::set(std::string_view column, double value) {
  for (auto& [name, v] : values) {
    if (name == column) {
      v = value;
      return;
    }
  }
  values.emplace_back(std::string(column), value);
}

const double* SystemSummary::find(std::string_view column) const {
  for (const auto& [name, v] : means) {
    if (name == column) return &v;
  }
  return nullptr;
}

SystemSummary MetricReport::summary() const {
  SystemSummary s;
  s.system = system;
  s.documents = rows.size();
  for (std::size_t i = 0; i < columns.size(); ++i) s.means.emplace_back(columns[i], means[i]);
  return s;
}

MetricReport aggregate_report(std::string system, std::vector<DocumentRow> rows) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "no document rows to aggregate");

  MetricReport report;
  report.system = std::move(system);
  for (const auto& [name, v] : rows.front().values) report.columns.push_back(name);
  sort_columns(report.columns);

  std::vector<double> sums(report.columns.size(), 0.0);
  for (auto& row : rows) {
    if (row.values.size() != report.columns.size()) {
      throw Error(Errc::MismatchedColumns, "row " + row.id + " has " + std::to_string(row.values.size()) +
                                               " columns, expected " + std::to_string(report.columns.size()));
    }
    std::vector<std::pair<std::string, double>> ordered;
    ordered.reserve(report.columns.size());
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      auto it = std::find_if(row.values.begin(), row.values.end(),
                             [&](const auto& kv) { return kv.first == report.columns[c]; });
      if (it == row.values.end()) {
        throw Error(Errc::MismatchedColumns, "row " + row.id + " lacks column " + report.columns[c]);
      }
      sums[c] += it->second;
      ordered.push_back(*it);
    }
    row.values = std::move(ordered);
  }
  const auto n = static_cast<double>(rows.size());
  for (double s : sums) report.means.push_back(s / n);
  report.rows = std::move(rows);
  return report;
}

std::string documents_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "system,id";
  for (const auto& c : report.columns) out << ',' << csv_field(c);
  out << '\n';
  for (const auto& row : report.rows) {
    out << csv_field(report.system) << ',' << csv_field(row.id);
    for (const auto& [name, v] : row.values) out << ',' << io::format_double(v);
    out << '\n';
  }
  return out.str();
}

std::string systems_csv(std::span<const SystemSummary> systems) {
  std::vector<std::string> columns;
  for (const auto& s : systems) {
    for (const auto& [name, v] : s.means) {
      if (std::find(columns.begin(), columns.end(), name) == columns.end()) columns.push_back(name);
    }
  }
  sort_columns(columns);

  std::ostringstream out;
  out << "system,documents";
  for (const auto& c : columns) out << ',' << csv_field(c);
  out << '\n';
  for (const auto& s : systems) {
    out << csv_field(s.system) << ',' << s.documents;
    for (const auto& c : columns) {
      out << ',';
      if (const double* v = s.find(c)) out << io::format_double(*v);
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SystemSummary> parse_systems_csv(std::string_view csv) {
  std::vector<std::string_view> lines;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    auto line = csv.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    csv.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(Errc::EmptyInput, "empty systems CSV");
  const auto header = csv_split(lines.front());
  if (header.size() < 2 || header[0] != "system" || header[1] != "documents") {
    throw Error(Errc::MalformedDocument, "systems CSV must start with system,documents");
  }
  std::vector<SystemSummary> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv_split(lines[i]);
    if (fields.size() != header.size()) throw Error(Errc::MalformedDocument, "ragged systems CSV row");
    SystemSummary s;
    s.system = fields[0];
    try {
      s.documents = static_cast<std::size_t>(std::stoull(fields[1]));
      for (std::size_t c = 2; c < fields.size(); ++c) {
        if (!fields[c].empty()) s.means.emplace_back(header[c], std::stod(fields[c]));
      }
    } catch (const std::logic_error&) {
      throw Error(Errc::MalformedDocument, "non-numeric value in systems CSV row " + std::to_string(i));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string systems_markdown(std::span<const SystemSummary> systems) {
  static constexpr std::array<TableColumn, 1> kReference = {{{column::kDsari, "D-SARI"}}};
  static constexpr std::array<TableColumn, 2> kMeaning = {{
      {column::kBertF1, "BERTScore"},
      {column::kSemSim, "Semantic similarity"},
  }};
  static constexpr std::array<TableColumn, 5> kSimplicity = {{
      {column::kFkgl, "FKGL"},
      {column::kWords, "Average number of words"},
      {column::kSentences, "Average number of sentences"},
      {column::kSyllablesPerWord, "Average number of syllables per word"},
      {column::kNamedEntities, "Average number of named entities"},
  }};

  std::ostringstream out;
  markdown_table(out, "System level D-SARI scores", kReference, systems);
  markdown_table(out, "System level scores for meaning preservation", kMeaning, systems);
  markdown_table(out, "System level scores for simplicity", kSimplicity, systems);
  return out.str();
}

}  // namespace ats::metrics
