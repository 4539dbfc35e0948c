#include "ats/textproc.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ats::text {
namespace {

constexpr std::array<std::string_view, 18> kAbbreviations = {
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "approx.", "incl.", "esp.", "al.",
    "fig.", "no.", "inc.", "ltd.", "corp.", "mr.", "ms.", "dr.", "resp.",
};

bool is_ascii_alpha(char c) noexcept { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_ascii_alnum(char c) noexcept { return is_ascii_alpha(c) || is_digit(c); }
bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
bool is_punct_char(char c) noexcept { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c) noexcept { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) noexcept { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) noexcept { return c == '"' || c == '\'' || c == '(' || c == '['; }

// The whitespace-delimited chunk ending at `end` (exclusive), without leading brackets/quotes.
std::string_view chunk_before(std::string_view text, std::size_t end) {
  std::size_t begin = end;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  while (begin < end && (is_opener(text[begin]) || text[begin] == '<')) ++begin;
  return text.substr(begin, end - begin);
}

bool is_number_like(std::string_view core) {
  if (core.empty() || !is_digit(core.front()) || !is_digit(core.back())) return false;
  return std::all_of(core.begin(), core.end(), [](char c) {
    return is_digit(c) || c == '.' || c == ',' || c == '-' || c == '_' || c == ':' || c == '/';
  });
}

bool is_id_like(std::string_view core) {
  bool digit = false;
  bool alpha = false;
  for (char c : core) {
    digit = digit || is_digit(c);
    alpha = alpha || is_ascii_alpha(c);
  }
  if (digit && alpha) return true;
  for (std::size_t i = 1; i + 1 < core.size(); ++i) {
    const char c = core[i];
    if ((c == '.' || c == '_' || c == ':') && is_ascii_alnum(core[i - 1]) && is_ascii_alnum(core[i + 1])) {
      return true;
    }
  }
  return false;
}

bool is_vowel_at(std::string_view w, std::size_t i) noexcept {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i != 0;
    default: return false;
  }
}

bool is_consonant_at(std::string_view w, std::size_t i) noexcept {
  return is_ascii_alpha(w[i]) && !is_vowel_at(w, i);
}

}  // namespace

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_abbreviation(std::string_view token) {
  const std::string lower = to_lower_ascii(token);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

SentenceSplit split_sentences(std::string_view text) {
  SentenceSplit split;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n && is_space(text[i])) ++i;
  std::size_t start = i;

  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && (is_terminator(text[j]) || is_closer(text[j]))) ++j;
    if (j == n || !is_space(text[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && is_space(text[k])) ++k;
    if (k == n) break;
    const char next = text[k];
    if (!(is_upper(next) || is_digit(next) || is_opener(next))) {
      i = k;
      continue;
    }
    if (text[i] == '.' && is_abbreviation(chunk_before(text, i + 1))) {
      i = k;
      continue;
    }
    split.sentences.push_back({start, j});
    start = k;
    i = k;
  }

  std::size_t end = n;
  while (end > start && is_space(text[end - 1])) --end;
  if (end > start) split.sentences.push_back({start, end});
  return split;
}

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Word: return "word";
    case TokenKind::NumberLike: return "number-like";
    case TokenKind::IdLike: return "id-like";
    case TokenKind::Punct: return "punct";
  }
  return "word";
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  const std::size_t n = text.size();
  std::size_t i = 0;
  auto punct = [&](std::size_t at) {
    seq.tokens.push_back({std::string(1, text[at]), TokenKind::Punct, {at, at + 1}});
  };

  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i == n) break;
    std::size_t chunk_end = i;
    while (chunk_end < n && !is_space(text[chunk_end])) ++chunk_end;

    std::size_t a = i;
    while (a < chunk_end && is_punct_char(text[a])) punct(a++);

    std::size_t e = chunk_end;
    while (e > a && is_punct_char(text[e - 1])) --e;
    if (e > a && e < chunk_end && text[e] == '.' && is_abbreviation(text.substr(a, e + 1 - a))) ++e;

    if (e > a) {
      const std::string_view core = text.substr(a, e - a);
      Token tok;
      tok.span = {a, e};
      if (is_abbreviation(core)) {
        tok.kind = TokenKind::Word;
        tok.text = to_lower_ascii(core);
      } else if (is_number_like(core)) {
        tok.kind = TokenKind::NumberLike;
        tok.text = std::string(core);
      } else if (is_id_like(core)) {
        tok.kind = TokenKind::IdLike;
        tok.text = to_lower_ascii(core);
      } else {
        tok.kind = TokenKind::Word;
        tok.text = to_lower_ascii(core);
      }
      seq.tokens.push_back(std::move(tok));
    }
    for (std::size_t p = std::max(a, e); p < chunk_end; ++p) punct(p);
    i = chunk_end;
  }
  return seq;
}

std::vector<std::string> TokenSequence::words() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!t.is_punct()) out.push_back(t.text);
  }
  return out;
}

std::size_t TokenSequence::word_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return !t.is_punct(); }));
}

std::string TokenSequence::joined() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text;
  }
  return out;
}

std::size_t count_syllables(std::string_view word) {
  const std::string w = to_lower_ascii(word);
  std::size_t groups = 0;
  bool in_group = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool vowel = is_vowel_at(w, i);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }

  const std::size_t n = w.size();
  if (n >= 2 && w[n - 1] == 'e' && is_consonant_at(w, n - 2)) {
    const bool consonant_le = w[n - 2] == 'l' && n >= 3 && is_consonant_at(w, n - 3);
    if (!consonant_le && groups > 0) --groups;
  }
  return std::max<std::size_t>(1, groups);
}

std::size_t count_syllables(const Token& token) {
  if (token.kind == TokenKind::Word) return count_syllables(token.text);
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : token.text) {
    const bool digit = is_digit(c);
    if (digit && !in_group) ++groups;
    in_group = digit;
  }
  return std::max<std::size_t>(1, groups);
}

NGramCounts ngrams(const std::vector<std::string>& words, std::size_t n) {
  NGramCounts counts;
  if (n == 0 || words.size() < n) return counts;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    ++counts[NGram(words.begin() + static_cast<std::ptrdiff_t>(i),
                   words.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

NGramCounts ngrams(const TokenSequence& tokens, std::size_t n) { return ngrams(tokens.words(), n); }

}  // namespace ats::text
