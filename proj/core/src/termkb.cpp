#include "ats/termkb.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/prompts.hpp"

namespace ats::termkb {
namespace {

using nlohmann::json;

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string normalize_query(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : text::trim(s)) {
    if (text::is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return text::to_lower_ascii(out);
}

bool overlaps(const text::Span& a, const text::Span& b) { return a.start < b.end && b.start < a.end; }

// Keeps the earliest-starting (then longest) mention of every overlapping group.
std::vector<TermMention> drop_overlaps(std::vector<TermMention> mentions) {
  std::sort(mentions.begin(), mentions.end(), [](const TermMention& a, const TermMention& b) {
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.span.size() > b.span.size();
  });
  std::vector<TermMention> out;
  for (auto& m : mentions) {
    if (!out.empty() && overlaps(out.back().span, m.span)) continue;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::Con: return "CON";
    case Label::Malware: return "MALWARE";
    case Label::Tactic: return "TACTIC";
    case Label::Technique: return "TECHNIQUE";
    case Label::Tool: return "TOOL";
  }
  return "CON";
}

std::optional<Label> label_from_string(std::string_view name) {
  for (Label l : {Label::Con, Label::Malware, Label::Tactic, Label::Technique, Label::Tool}) {
    if (text::to_lower_ascii(name) == text::to_lower_ascii(to_string(l))) return l;
  }
  return std::nullopt;
}

std::string_view to_string(MentionSource source) noexcept {
  return source == MentionSource::Lexicon ? "lexicon" : "ner";
}

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::Lexicon: return "lexicon";
    case Strategy::Ner: return "ner";
    case Strategy::Union: return "union";
  }
  return "lexicon";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "lexicon") return Strategy::Lexicon;
  if (name == "ner") return Strategy::Ner;
  if (name == "union") return Strategy::Union;
  throw Error(Errc::ConfigError, "unknown extraction strategy '" + std::string(name) + "'");
}

LexiconEntry entry_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    LexiconEntry e;
    e.term = j.at("term").get<std::string>();
    if (auto it = j.find("aliases"); it != j.end() && !it->is_null()) e.aliases = it->get<std::vector<std::string>>();
    e.definition = j.at("definition").get<std::string>();
    e.source = j.value("source", std::string());
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
      const auto name = it->get<std::string>();
      e.label = label_from_string(name);
      if (!e.label) throw Error(Errc::InvalidEntry, "label '" + name + "' is not one of CON, MALWARE, TACTIC, TECHNIQUE, TOOL");
    }
    return e;
  } catch (const json::exception& ex) {
    throw Error(Errc::InvalidEntry, std::string("lexicon line: ") + ex.what());
  }
}

std::string to_json_line(const LexiconEntry& entry) {
  json j = {{"term", entry.term}, {"aliases", entry.aliases}, {"definition", entry.definition}, {"source", entry.source}};
  if (entry.label) j["label"] = std::string(to_string(*entry.label));
  return j.dump();
}

std::vector<LexiconEntry> read_lexicon(const std::filesystem::path& path) {
  std::vector<LexiconEntry> out;
  for (const auto& line : io::read_lines(path)) out.push_back(entry_from_json_line(line));
  return out;
}

LexiconIndex index_lexicon(std::vector<LexiconEntry> entries) {
  LexiconIndex idx;
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (text::trim(e.term).empty()) throw Error(Errc::InvalidEntry, "lexicon entry with empty term");
    if (text::trim(e.definition).empty()) throw Error(Errc::InvalidEntry, "lexicon entry '" + e.term + "' has no definition");
    if (!seen.insert(normalize_query(e.term)).second) throw Error(Errc::DuplicateTerm, "duplicate lexicon term '" + e.term + "'");
  }
  idx.entries_ = std::move(entries);

  std::size_t total = 0;
  idx.lengths_.reserve(idx.entries_.size());
  for (std::size_t i = 0; i < idx.entries_.size(); ++i) {
    const auto& e = idx.entries_[i];
    std::string body = e.term;
    for (const auto& a : e.aliases) body += " " + a;
    body += " " + e.definition;
    const auto words = text::tokenize(body).words();
    idx.lengths_.push_back(words.size());
    total += words.size();

    std::unordered_map<std::string, std::size_t> tf;
    for (const auto& w : words) ++tf[w];
    for (auto& [w, n] : tf) idx.postings_[w].push_back({i, n});

    std::unordered_set<std::string> forms;
    forms.insert(normalize_query(e.term));
    for (const auto& a : e.aliases) {
      if (!text::trim(a).empty()) forms.insert(normalize_query(a));
    }
    for (const auto& f : forms) {
      idx.exact_[f].push_back(i);
      idx.surfaces_.push_back({f, i});
    }
  }
  idx.avg_length_ = idx.entries_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(idx.entries_.size());

  std::sort(idx.surfaces_.begin(), idx.surfaces_.end(), [](const auto& a, const auto& b) {
    if (a.form.size() != b.form.size()) return a.form.size() > b.form.size();
    if (a.form != b.form) return a.form < b.form;
    return a.entry < b.entry;
  });
  // One entry per surface form; the first-listed entry owns it.
  idx.surfaces_.erase(std::unique(idx.surfaces_.begin(), idx.surfaces_.end(),
                                  [](const auto& a, const auto& b) { return a.form == b.form; }),
                      idx.surfaces_.end());
  return idx;
}

std::vector<double> LexiconIndex::scores(std::span<const std::string> query_words) const {
  std::vector<double> out(entries_.size(), 0.0);
  if (entries_.empty()) return out;
  const auto n = static_cast<double>(entries_.size());
  std::vector<std::string_view> unique(query_words.begin(), query_words.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (auto w : unique) {
    auto it = postings_.find(std::string(w));
    if (it == postings_.end()) continue;
    const auto df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& p : it->second) {
      const auto tf = static_cast<double>(p.tf);
      const double norm = kK1 * (1.0 - kB + kB * static_cast<double>(lengths_[p.entry]) / avg_length_);
      out[p.entry] += idf * tf * (kK1 + 1.0) / (tf + norm);
    }
  }
  return out;
}

double LexiconIndex::score(std::size_t doc, std::span<const std::string> query_words) const {
  if (doc >= entries_.size()) return 0.0;
  return scores(query_words)[doc];
}

std::vector<std::size_t> LexiconIndex::exact_matches(std::string_view query) const {
  auto it = exact_.find(normalize_query(query));
  return it == exact_.end() ? std::vector<std::size_t>{} : it->second;
}

std::vector<RetrievalHit> retrieve(const LexiconIndex& index, std::string_view query, std::size_t k) {
  if (index.empty() || k == 0) return {};
  const auto words = text::tokenize(query).words();

  const auto scores = index.scores(words);
  std::vector<RetrievalHit> hits(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    hits[i].entry = i;
    hits[i].score = scores[i];
  }
  for (auto i : index.exact_matches(query)) hits[i].exact = true;

  std::erase_if(hits, [](const RetrievalHit& h) { return !h.exact && !(h.score > 0.0); });
  std::sort(hits.begin(), hits.end(), [&](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.exact != b.exact) return a.exact;
    if (a.score != b.score) return a.score > b.score;
    return index.entry(a.entry).term < index.entry(b.entry).term;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<TermMention> TermExtractor::match_lexicon(std::string_view doc) const {
  const std::string lower = text::to_lower_ascii(doc);
  const auto surfaces = index_->surfaces();
  std::vector<TermMention> out;
  std::size_t i = 0;
  while (i < lower.size()) {
    if (i > 0 && is_alnum(lower[i - 1]) && is_alnum(lower[i])) {
      ++i;
      continue;
    }
    std::optional<TermMention> found;
    for (const auto& s : surfaces) {
      const std::size_t len = s.form.size();
      if (len == 0 || i + len > lower.size() || lower[i] != s.form[0]) continue;
      if (lower.compare(i, len, s.form) != 0) continue;
      if (i + len < lower.size() && is_alnum(lower[i + len]) && is_alnum(s.form.back())) continue;
      const auto& entry = index_->entry(s.entry);
      found = TermMention{std::string(doc.substr(i, len)), entry.label.value_or(Label::Con), {i, i + len},
                          MentionSource::Lexicon};
      break;  // surfaces are longest-first
    }
    if (found) {
      i = found->span.end;
      out.push_back(std::move(*found));
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<TermMention> TermExtractor::filter_ner(std::string_view doc, const std::vector<NerMention>& raw) const {
  std::vector<TermMention> kept;
  for (const auto& m : raw) {
    const auto label = label_from_string(m.label);
    if (!label) continue;
    if (m.start >= m.end || m.end > doc.size()) continue;
    kept.push_back({std::string(doc.substr(m.start, m.end - m.start)), *label, {m.start, m.end}, MentionSource::Ner});
  }
  return drop_overlaps(std::move(kept));
}

ExtractionResult TermExtractor::extract(std::string_view doc, Strategy strategy) const {
  ExtractionResult result;
  if (strategy == Strategy::Lexicon) {
    result.mentions = match_lexicon(doc);
    return result;
  }
  if (ner_ == nullptr) throw Error(Errc::ConfigError, "strategy '" + std::string(to_string(strategy)) + "' needs an NER endpoint");

  auto ner = filter_ner(doc, ner_->recognize(doc));
  if (strategy == Strategy::Ner) {
    result.mentions = std::move(ner);
    return result;
  }
  auto merged = match_lexicon(doc);
  const std::size_t lexicon_count = merged.size();
  for (auto& m : ner) {
    const bool clash = std::any_of(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(lexicon_count),
                                   [&](const TermMention& l) { return overlaps(l.span, m.span); });
    if (!clash) merged.push_back(std::move(m));
  }
  std::sort(merged.begin(), merged.end(),
            [](const TermMention& a, const TermMention& b) { return a.span.start < b.span.start; });
  result.mentions = std::move(merged);
  return result;
}

ExtractionResult TermExtractor::extract_with_fallback(std::string_view doc, Strategy strategy) const {
  if (strategy == Strategy::Lexicon) return extract(doc, strategy);
  try {
    return extract(doc, strategy);
  } catch (const Error& e) {
    if (e.code() != Errc::NerUnavailable && e.code() != Errc::ConfigError) throw;
    ExtractionResult result;
    result.mentions = match_lexicon(doc);
    result.warnings.push_back(std::string("NER unavailable, fell back to lexicon matching: ") + e.what());
    return result;
  }
}

ExtractionResult extract_terms(std::string_view doc, Strategy strategy, const LexiconIndex& index, NerClient* ner) {
  return TermExtractor(index, ner).extract(doc, strategy);
}

std::vector<TermExplanation> explain_terms(std::span<const TermMention> mentions, const LexiconIndex& index,
                                           ChatClient& llm, const PromptSet& prompts, const ExplainOptions& options) {
  std::vector<TermExplanation> items;
  std::unordered_set<std::string> seen;
  for (const auto& m : mentions) {
    if (!seen.insert(normalize_query(m.surface)).second) continue;
    TermExplanation item;
    item.term = m.surface;
    for (const auto& hit : retrieve(index, m.surface, options.k)) item.evidence.push_back(index.entry(hit.entry));
    items.push_back(std::move(item));
  }

  const auto& tmpl = prompts.get(options.prompt_id);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& item = items[i];
    if (item.evidence.empty()) continue;
    std::string evidence;
    for (const auto& e : item.evidence) {
      evidence += "- " + e.term;
      if (!e.source.empty()) evidence += " (" + e.source + ")";
      evidence += ": " + e.definition + "\n";
    }
    evidence.pop_back();
    item.prompt = tmpl.render({{"term", item.term}, {"evidence", evidence}});
    pending.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> transport_failures{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < pending.size(); p = next++) {
      auto& item = items[pending[p]];
      try {
        const auto reply = llm.chat(item.prompt);
        if (reply.refusal) {
          item.error = "refusal";
        } else {
          item.explanation = std::string(text::trim(reply.text));
          item.explained = true;
        }
      } catch (const Error& e) {
        if (e.code() == Errc::Transport) ++transport_failures;
        item.error = e.what();
      } catch (const std::exception& e) {
        item.error = e.what();
      }
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(1, options.max_parallel), pending.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (!pending.empty() && transport_failures == pending.size()) {
    throw Error(Errc::LlmUnavailable, "every explanation request failed: " + items[pending.front()].error);
  }
  return items;
}

}  // namespace ats::termkb
