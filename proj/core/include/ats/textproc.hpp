#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ats::text {

/// Half-open byte range [start, end) into a source string.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  std::string_view in(std::string_view source) const { return source.substr(start, end - start); }
  friend bool operator==(const Span&, const Span&) = default;
};

/// Ordered, non-overlapping sentence spans. Anything between two spans
/// (and before the first / after the last) is whitespace.
struct SentenceSplit {
  std::vector<Span> sentences;

  std::size_t size() const noexcept { return sentences.size(); }
  bool empty() const noexcept { return sentences.empty(); }
};

SentenceSplit split_sentences(std::string_view text);

/// True when the lowercase token (including its dots) is a known abbreviation such as "e.g.".
bool is_abbreviation(std::string_view token);

enum class TokenKind { Word, NumberLike, IdLike, Punct };

std::string_view to_string(TokenKind kind) noexcept;

struct Token {
  std::string text;  // lowercased for words and ids; exact source characters for number-like
  TokenKind kind = TokenKind::Word;
  Span span;  // position in the tokenized source

  bool is_punct() const noexcept { return kind == TokenKind::Punct; }
  bool is_literal() const noexcept { return kind == TokenKind::NumberLike || kind == TokenKind::IdLike; }
};

struct TokenSequence {
  std::vector<Token> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  /// Token strings with punctuation removed; the unit used for word counts and n-grams.
  std::vector<std::string> words() const;
  std::size_t word_count() const noexcept;
  /// Token texts joined by single spaces.
  std::string joined() const;
};

TokenSequence tokenize(std::string_view text);

/// Vowel-group heuristic for word tokens; always >= 1.
std::size_t count_syllables(std::string_view word);
/// Dispatches on kind: number-like and id-like tokens count one syllable per digit group.
std::size_t count_syllables(const Token& token);

using NGram = std::vector<std::string>;
using NGramCounts = std::map<NGram, std::size_t>;

NGramCounts ngrams(const TokenSequence& tokens, std::size_t n);
NGramCounts ngrams(const std::vector<std::string>& words, std::size_t n);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s) noexcept;
bool is_space(char c) noexcept;

}  // namespace ats::text
