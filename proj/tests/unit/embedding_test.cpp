#include <gtest/gtest.h>

#include <cmath>

#include "ats/embedding.hpp"
#include "ats/error.hpp"
#include "fixtures.hpp"
#include "mock_server.hpp"

using namespace ats;
using ats::testing::errc_of;

TEST(hash_embedding_test, deterministic_unit_vectors) {
  HashEmbeddingProvider a(7), b(7), c(8);
  EXPECT_EQ(16u, a.dimension());
  const auto v = a.token_vector("overflow");
  EXPECT_EQ(v, b.token_vector("overflow"));
  EXPECT_NE(v, c.token_vector("overflow"));
  EXPECT_NE(v, a.token_vector("underflow"));
  double norm = 0;
  for (double x : v) norm += x * x;
  EXPECT_NEAR(1.0, std::sqrt(norm), 1e-12);
}

TEST(hash_embedding_test, token_mode_preserves_length_and_order) {
  HashEmbeddingProvider p(1);
  const std::vector<std::string> tokens{"a", "b", "a"};
  const auto vs = p.embed_tokens(tokens);
  ASSERT_EQ(3u, vs.size());
  EXPECT_EQ(vs[0], vs[2]);
  EXPECT_EQ(vs[0], p.token_vector("a"));
}

TEST(cosine_test, basics) {
  const std::vector<double> x{1, 0}, y{0, 2}, z{3, 0}, zero{0, 0};
  EXPECT_DOUBLE_EQ(0.0, cosine(x, y));
  EXPECT_DOUBLE_EQ(1.0, cosine(x, z));
  EXPECT_DOUBLE_EQ(0.0, cosine(x, zero));
}

TEST(http_embedding_test, matches_mock_endpoint) {
  ats::testing::MockServer server;
  HttpEmbeddingProvider http({server.base_url(), "mock-embed", "", std::chrono::milliseconds(5000)});
  HashEmbeddingProvider local(7);
  const auto v = http.embed_text("remote attackers read files");
  EXPECT_EQ(local.embed_text("remote attackers read files"), v);
  EXPECT_EQ(16u, http.dimension());
  const std::vector<std::string> tokens{"read", "files"};
  EXPECT_EQ(2u, http.embed_tokens(tokens).size());
  EXPECT_GE(server.embedding_calls(), 2u);
}

TEST(http_embedding_test, unreachable_endpoint) {
  HttpEmbeddingProvider http({"http://127.0.0.1:1", "m", "", std::chrono::milliseconds(500)});
  EXPECT_EQ(Errc::ProviderFailure, errc_of([&] { http.embed_text("x"); }));
}
