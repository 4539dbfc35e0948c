#include "ats/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ats/error.hpp"
#include "ats/termkb.hpp"

namespace ats::metrics {
namespace {

std::size_t count_of(const text::NGramCounts& counts, const text::NGram& gram) {
  auto it = counts.find(gram);
  return it == counts.end() ? 0 : it->second;
}

std::size_t sat_sub(std::size_t a, std::size_t b) { return a > b ? a - b : 0; }

// 0/0 is a vacuous success. Numerators never exceed their denominators.
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

void check_vectors(const std::vector<Vector>& vectors, std::size_t expected, const EmbeddingProvider& provider) {
  if (vectors.size() != expected) {
    throw Error(Errc::ProviderFailure, provider.name() + " returned " + std::to_string(vectors.size()) +
                                           " vectors for " + std::to_string(expected) + " tokens");
  }
  for (const auto& v : vectors) {
    if (v.empty() || v.size() != vectors.front().size()) {
      throw Error(Errc::ProviderFailure, provider.name() + " returned vectors of inconsistent dimension");
    }
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      throw Error(Errc::ProviderFailure, provider.name() + " returned a non-finite component");
    }
  }
}

template <typename F>
auto call_provider(const EmbeddingProvider& provider, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::ProviderFailure) throw;
    throw Error(Errc::ProviderFailure, provider.name() + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::ProviderFailure, provider.name() + ": " + e.what());
  }
}

}  // namespace

SariBreakdown sari_order(const text::NGramCounts& input, const text::NGramCounts& output,
                         const text::NGramCounts& reference) {
  std::size_t keep_ior = 0, keep_io = 0, keep_ir = 0;
  std::size_t del_num = 0, del_den = 0;
  for (const auto& [gram, in] : input) {
    const std::size_t out = count_of(output, gram);
    const std::size_t ref = count_of(reference, gram);
    keep_io += std::min(in, out);
    keep_ir += std::min(in, ref);
    keep_ior += std::min({in, out, ref});

    const std::size_t deleted = sat_sub(in, out);
    del_den += deleted;
    del_num += std::min(deleted, sat_sub(in, ref));
  }

  std::size_t add_num = 0, add_out = 0, add_ref = 0;
  for (const auto& [gram, out] : output) {
    const std::size_t in = count_of(input, gram);
    const std::size_t added = sat_sub(out, in);
    add_out += added;
    add_num += std::min(added, sat_sub(count_of(reference, gram), in));
  }
  for (const auto& [gram, ref] : reference) add_ref += sat_sub(ref, count_of(input, gram));

  SariBreakdown s;
  s.f_keep = harmonic(ratio(keep_ior, keep_io), ratio(keep_ior, keep_ir));
  s.f_add = harmonic(ratio(add_num, add_out), ratio(add_num, add_ref));
  s.p_del = ratio(del_num, del_den);
  return s;
}

SariBreakdown sari_components(const std::vector<std::string>& input, const std::vector<std::string>& output,
                              const std::vector<std::string>& reference, std::size_t max_n) {
  if (max_n == 0) throw Error(Errc::ConfigError, "max_n must be >= 1");
  SariBreakdown total;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto s = sari_order(text::ngrams(input, n), text::ngrams(output, n), text::ngrams(reference, n));
    total.f_keep += s.f_keep;
    total.f_add += s.f_add;
    total.p_del += s.p_del;
  }
  const auto orders = static_cast<double>(max_n);
  total.f_keep /= orders;
  total.f_add /= orders;
  total.p_del /= orders;
  return total;
}

SariBreakdown sari_components(const text::TokenSequence& input, const text::TokenSequence& output,
                              const text::TokenSequence& reference, std::size_t max_n) {
  return sari_components(input.words(), output.words(), reference.words(), max_n);
}

Document Document::from(std::string_view text) {
  return Document{std::string(text), text::tokenize(text), text::split_sentences(text)};
}

DsariResult dsari(const Document& input, const Document& output, const Document& reference, std::size_t max_n) {
  const auto ref_len = static_cast<double>(reference.tokens.word_count());
  if (ref_len == 0.0) throw Error(Errc::EmptyReference, "reference document has no tokens");
  const auto out_len = static_cast<double>(output.tokens.word_count());
  const auto ref_sents = static_cast<double>(reference.sentences.size());
  const auto out_sents = static_cast<double>(output.sentences.size());

  DsariResult r;
  r.sari = sari_components(input.tokens, output.tokens, reference.tokens, max_n);
  r.lp = std::exp(-std::abs(out_len - ref_len) / ref_len);
  r.slp = std::exp(-std::abs(out_sents - ref_sents) / std::max(1.0, ref_sents));
  r.d_keep = r.sari.f_keep * r.slp * r.lp;
  r.d_add = r.sari.f_add * r.lp;
  r.d_del = r.sari.p_del * r.lp;
  r.d_sari = (r.d_keep + r.d_del + r.d_add) / 3.0;
  return r;
}

DsariResult dsari(std::string_view input, std::string_view output, std::string_view reference, std::size_t max_n) {
  return dsari(Document::from(input), Document::from(output), Document::from(reference), max_n);
}

ReadabilityStats readability(std::string_view doc_text) {
  const auto tokens = text::tokenize(doc_text);
  ReadabilityStats s;
  for (const auto& t : tokens.tokens) {
    if (t.is_punct()) continue;
    ++s.word_count;
    s.syllable_count += text::count_syllables(t);
  }
  if (s.word_count == 0) throw Error(Errc::NoWords, "text contains no words");
  s.sentence_count = std::max<std::size_t>(1, text::split_sentences(doc_text).size());
  s.asl = static_cast<double>(s.word_count) / static_cast<double>(s.sentence_count);
  s.asw = static_cast<double>(s.syllable_count) / static_cast<double>(s.word_count);
  s.fkgl = 0.39 * s.asl + 11.8 * s.asw - 15.59;
  return s;
}

BertScoreResult bertscore(std::span<const std::string> candidate, std::span<const std::string> reference,
                          EmbeddingProvider& provider) {
  if (candidate.empty() || reference.empty()) throw Error(Errc::EmptySequence, "bertscore needs non-empty token sequences");
  const auto cand = call_provider(provider, [&] { return provider.embed_tokens(candidate); });
  const auto ref = call_provider(provider, [&] { return provider.embed_tokens(reference); });
  check_vectors(cand, candidate.size(), provider);
  check_vectors(ref, reference.size(), provider);
  if (cand.front().size() != ref.front().size()) {
    throw Error(Errc::ProviderFailure, provider.name() + " changed dimension between calls");
  }

  std::vector<double> best_for_ref(ref.size(), -1.0);
  double precision = 0.0;
  for (const auto& c : cand) {
    double best = -1.0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double sim = cosine(c, ref[j]);
      best = std::max(best, sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
    precision += best;
  }
  double recall = 0.0;
  for (double b : best_for_ref) recall += b;

  BertScoreResult r;
  r.precision = precision / static_cast<double>(cand.size());
  r.recall = recall / static_cast<double>(ref.size());
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

BertScoreResult bertscore_text(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider) {
  const auto c = text::tokenize(candidate).words();
  const auto r = text::tokenize(reference).words();
  return bertscore(c, r, provider);
}

double semantic_similarity(std::string_view candidate, std::string_view reference, EmbeddingProvider& provider) {
  if (text::trim(candidate).empty() || text::trim(reference).empty()) {
    throw Error(Errc::EmptySequence, "semantic similarity needs non-empty texts");
  }
  const auto a = call_provider(provider, [&] { return provider.embed_text(candidate); });
  const auto b = call_provider(provider, [&] { return provider.embed_text(reference); });
  check_vectors({a}, 1, provider);
  check_vectors({b}, 1, provider);
  if (a.size() != b.size()) throw Error(Errc::ProviderFailure, provider.name() + " changed dimension between calls");
  return cosine(a, b);
}

NeStats ne_stats(std::span<const std::string> docs, const termkb::TermExtractor& extractor,
                 termkb::Strategy strategy) {
  NeStats stats;
  stats.counts.reserve(docs.size());
  double sum = 0.0;
  for (const auto& doc : docs) {
    const auto n = extractor.extract(doc, strategy).mentions.size();
    stats.counts.push_back(n);
    sum += static_cast<double>(n);
  }
  stats.mean = docs.empty() ? 0.0 : sum / static_cast<double>(docs.size());
  return stats;
}

}  // namespace ats::metrics
