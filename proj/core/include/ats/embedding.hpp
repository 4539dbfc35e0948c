#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ats {

using Vector = std::vector<double>;

/// Maps text to fixed-dimension real vectors. Implementations must tolerate
/// concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  /// One vector per input token, same order and length as the input.
  virtual std::vector<Vector> embed_tokens(std::span<const std::string> tokens) = 0;
  /// One vector for the whole text.
  virtual Vector embed_text(std::string_view text) = 0;
  virtual std::string name() const = 0;
};

double cosine(std::span<const double> a, std::span<const double> b);

/// Offline provider: each token is hashed into a seeded PRNG stream that fills
/// a unit-normalized vector. Identical tokens always map to identical vectors.
/// Text embeddings are the normalized sum of the text's word vectors.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 16;

  explicit HashEmbeddingProvider(std::uint64_t seed = 0, std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed_tokens(std::span<const std::string> tokens) override;
  Vector embed_text(std::string_view text) override;
  std::string name() const override;

  Vector token_vector(std::string_view token) const;

 private:
  std::uint64_t seed_;
  std::size_t dimension_;
};

struct EmbeddingConfig {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
};

/// OpenAI-style `/v1/embeddings` client. Tokens are sent as separate inputs,
/// so token vectors are context-free.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(EmbeddingConfig config);

  std::size_t dimension() const override;
  std::vector<Vector> embed_tokens(std::span<const std::string> tokens) override;
  Vector embed_text(std::string_view text) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  std::vector<Vector> request(const std::vector<std::string>& inputs);

  EmbeddingConfig config_;
  std::atomic<std::size_t> dimension_{0};  // learned from the first response
};

}  // namespace ats
