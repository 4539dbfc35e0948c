#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ats/error.hpp"
#include "ats/metrics.hpp"
#include "ats/termkb.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ats;
using namespace ats::metrics;
using ats::testing::errc_of;

namespace {

using Words = std::vector<std::string>;

Words random_words(std::mt19937& rng, std::size_t max_len) {
  static const Words alphabet{"a", "b", "c", "d", "e"};
  Words out(rng() % (max_len + 1));
  for (auto& w : out) w = alphabet[rng() % alphabet.size()];
  return out;
}

std::string random_document(std::mt19937& rng) {
  static const Words vocab{"the", "attacker", "can", "read", "files", "on", "server", "version", "2.4.1", "allows"};
  std::string out;
  const auto sentences = 1 + rng() % 3;
  for (std::size_t s = 0; s < sentences; ++s) {
    const auto len = 1 + rng() % 8;
    std::string sentence;
    for (std::size_t i = 0; i < len; ++i) sentence += (i ? " " : "") + vocab[rng() % vocab.size()];
    sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
    out += (s ? " " : "") + sentence + ".";
  }
  return out;
}

}  // namespace

TEST(sari_test, identity) {
  const Words x{"a", "b", "c", "d", "e"};
  const auto s = sari_components(x, x, x);
  EXPECT_DOUBLE_EQ(1.0, s.f_keep);
  EXPECT_DOUBLE_EQ(1.0, s.f_add);
  EXPECT_DOUBLE_EQ(1.0, s.p_del);
}

TEST(sari_test, hand_cases_unigram) {
  const auto a = sari_components(Words{"a", "b", "c", "d"}, Words{"a", "b", "e"}, Words{"a", "b", "e"}, 1);
  EXPECT_DOUBLE_EQ(1.0, a.f_keep);
  EXPECT_DOUBLE_EQ(1.0, a.f_add);
  EXPECT_DOUBLE_EQ(1.0, a.p_del);

  const auto b = sari_components(Words{"a", "b", "c", "d"}, Words{"a", "b", "c"}, Words{"a", "b"}, 1);
  EXPECT_NEAR(0.8, b.f_keep, 1e-12);
  EXPECT_DOUBLE_EQ(1.0, b.f_add);
  EXPECT_DOUBLE_EQ(1.0, b.p_del);
}

TEST(sari_test, additions_not_in_reference) {
  const auto s = sari_components(Words{"a", "b"}, Words{"a", "b", "x"}, Words{"a", "b", "y"}, 1);
  EXPECT_DOUBLE_EQ(1.0, s.f_keep);
  EXPECT_DOUBLE_EQ(0.0, s.f_add);
}

TEST(sari_test, matches_naive_oracle) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto in = random_words(rng, 12), out = random_words(rng, 12), ref = random_words(rng, 12);
    for (std::size_t max_n : {1u, 2u, 4u}) {
      const auto got = sari_components(in, out, ref, max_n);
      const auto want = ats::testing::naive_sari(in, out, ref, max_n);
      ASSERT_EQ(want.f_keep, got.f_keep);
      ASSERT_EQ(want.f_add, got.f_add);
      ASSERT_EQ(want.p_del, got.p_del);
    }
  }
}

TEST(sari_test, components_in_unit_range) {
  std::mt19937 rng(8);
  for (int i = 0; i < 300; ++i) {
    const auto s = sari_components(random_words(rng, 10), random_words(rng, 10), random_words(rng, 10));
    for (double v : {s.f_keep, s.f_add, s.p_del}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(dsari_test, hand_case) {
  const auto r = dsari("a b c d", "a b c", "a b", 1);
  EXPECT_NEAR(std::exp(-0.5), r.lp, 1e-12);
  EXPECT_DOUBLE_EQ(1.0, r.slp);
  const double expected = (0.8 * std::exp(-0.5) + std::exp(-0.5) + std::exp(-0.5)) / 3.0;
  EXPECT_NEAR(expected, r.d_sari, 1e-12);
  EXPECT_NEAR(0.5661, r.d_sari, 5e-4);
}

TEST(dsari_test, identity_property) {
  std::mt19937 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto doc = random_document(rng);
    EXPECT_NEAR(1.0, dsari(doc, doc, doc).d_sari, 1e-9) << doc;
  }
}

TEST(dsari_test, sentence_penalty) {
  const auto r = dsari("A b c. D e f.", "A b c. D e f.", "A b c d e f.", 1);
  EXPECT_NEAR(std::exp(-1.0), r.slp, 1e-12);
  EXPECT_DOUBLE_EQ(1.0, r.lp);
  EXPECT_NEAR(r.sari.f_keep * r.slp, r.d_keep, 1e-12);
}

TEST(dsari_test, bounds_and_structure) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto r = dsari(random_document(rng), random_document(rng), random_document(rng));
    for (double v : {r.d_keep, r.d_add, r.d_del, r.d_sari}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(r.d_keep, r.sari.f_keep);
    EXPECT_LE(r.d_add, r.sari.f_add);
    EXPECT_LE(r.d_del, r.sari.p_del);
    EXPECT_EQ((r.d_keep + r.d_del + r.d_add) / 3.0, r.d_sari);
  }
}

TEST(dsari_test, empty_reference) { EXPECT_EQ(Errc::EmptyReference, errc_of([] { dsari("a b", "a", " . "); })); }

TEST(readability_test, hand_case) {
  const auto r = readability("The cat sat on the mat. It was happy.");
  EXPECT_EQ(9u, r.word_count);
  EXPECT_EQ(2u, r.sentence_count);
  EXPECT_EQ(10u, r.syllable_count);
  EXPECT_DOUBLE_EQ(4.5, r.asl);
  EXPECT_DOUBLE_EQ(10.0 / 9.0, r.asw);
  EXPECT_NEAR(-0.7239, r.fkgl, 1e-3);
  EXPECT_NEAR(0.39 * 4.5 + 11.8 * 10.0 / 9.0 - 15.59, r.fkgl, 1e-12);
}

TEST(readability_test, single_word) {
  const auto r = readability("cat.");
  EXPECT_DOUBLE_EQ(1.0, r.asl);
  EXPECT_DOUBLE_EQ(1.0, r.asw);
  EXPECT_NEAR(-3.4, r.fkgl, 1e-12);
}

TEST(readability_test, duplication_invariance) {
  std::mt19937 rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto doc = random_document(rng);
    const auto once = readability(doc);
    const auto twice = readability(doc + " " + doc);
    EXPECT_NEAR(once.asl, twice.asl, 1e-12);
    EXPECT_NEAR(once.asw, twice.asw, 1e-12);
    EXPECT_NEAR(once.fkgl, twice.fkgl, 1e-12);
  }
}

TEST(readability_test, no_words) { EXPECT_EQ(Errc::NoWords, errc_of([] { readability(" ... "); })); }

TEST(bertscore_test, identity_permutation_disjoint) {
  HashEmbeddingProvider hash(3);
  const std::vector<std::string> ref{"remote", "attackers", "read", "files"};
  const auto same = bertscore(ref, ref, hash);
  EXPECT_NEAR(1.0, same.f1, 1e-9);

  const std::vector<std::string> perm{"files", "read", "remote", "attackers"};
  EXPECT_NEAR(1.0, bertscore(perm, ref, hash).f1, 1e-9);

  ats::testing::OneHotProvider onehot;
  const auto disjoint = bertscore(std::vector<std::string>{"alpha", "beta"}, ref, onehot);
  EXPECT_NEAR(0.0, disjoint.precision, 1e-9);
  EXPECT_NEAR(0.0, disjoint.recall, 1e-9);
  EXPECT_NEAR(0.0, disjoint.f1, 1e-9);
}

TEST(bertscore_test, partial_overlap_with_one_hot) {
  ats::testing::OneHotProvider onehot;
  const auto r = bertscore(std::vector<std::string>{"a", "b", "x"}, std::vector<std::string>{"a", "b"}, onehot);
  EXPECT_NEAR(2.0 / 3.0, r.precision, 1e-12);
  EXPECT_NEAR(1.0, r.recall, 1e-12);
  EXPECT_NEAR(0.8, r.f1, 1e-12);
}

TEST(bertscore_test, bounds_and_empty) {
  HashEmbeddingProvider hash(5);
  std::mt19937 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto r = bertscore_text(random_document(rng), random_document(rng), hash);
    for (double v : {r.precision, r.recall, r.f1}) {
      EXPECT_GE(v, -1.0 - 1e-12);
      EXPECT_LE(v, 1.0 + 1e-12);
    }
  }
  EXPECT_EQ(Errc::EmptySequence, errc_of([&] { bertscore(std::vector<std::string>{}, std::vector<std::string>{"a"}, hash); }));
}

TEST(semantic_similarity_test, identity_symmetry_orthogonal) {
  HashEmbeddingProvider hash(1);
  std::mt19937 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_document(rng), b = random_document(rng);
    const double ab = semantic_similarity(a, b, hash);
    EXPECT_EQ(ab, semantic_similarity(b, a, hash));
    EXPECT_GE(ab, -1.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_NEAR(1.0, semantic_similarity(a, a, hash), 1e-9);
  }
  ats::testing::OneHotProvider onehot;
  EXPECT_NEAR(0.0, semantic_similarity("red green", "blue yellow", onehot), 1e-12);
}

TEST(ne_stats_test, counts_lexicon_terms) {
  const auto index = termkb::index_lexicon(ats::testing::fixture_lexicon());
  const termkb::TermExtractor extractor(index);
  const std::vector<std::string> docs{
      "A SQL injection lets attackers run a buffer overflow and then phishing.", "", "Nothing to see."};
  const auto s = ne_stats(docs, extractor, termkb::Strategy::Lexicon);
  EXPECT_EQ((std::vector<std::size_t>{3, 0, 0}), s.counts);
  EXPECT_DOUBLE_EQ(1.0, s.mean);
}
