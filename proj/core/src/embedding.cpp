#include "ats/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/textproc.hpp"
#include "http_util.hpp"

namespace ats {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void normalize(Vector& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

HashEmbeddingProvider::HashEmbeddingProvider(std::uint64_t seed, std::size_t dimension)
    : seed_(seed), dimension_(dimension) {
  if (dimension_ == 0) throw Error(Errc::ConfigError, "embedding dimension must be positive");
}

Vector HashEmbeddingProvider::token_vector(std::string_view token) const {
  std::mt19937_64 engine(fnv1a(token) ^ (seed_ * 0x9E3779B97F4A7C15ULL));
  Vector v(dimension_);
  for (double& x : v) {
    // 53 random mantissa bits mapped onto [-1, 1).
    x = static_cast<double>(engine() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  normalize(v);
  return v;
}

std::vector<Vector> HashEmbeddingProvider::embed_tokens(std::span<const std::string> tokens) {
  std::vector<Vector> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(token_vector(t));
  return out;
}

Vector HashEmbeddingProvider::embed_text(std::string_view text) {
  Vector sum(dimension_, 0.0);
  for (const auto& w : text::tokenize(text).words()) {
    const auto v = token_vector(w);
    for (std::size_t i = 0; i < dimension_; ++i) sum[i] += v[i];
  }
  normalize(sum);
  return sum;
}

std::string HashEmbeddingProvider::name() const {
  return "hash-" + std::to_string(dimension_) + "@" + std::to_string(seed_);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingConfig config) : config_(std::move(config)) {
  if (config_.model.empty()) throw Error(Errc::ConfigError, "embedding model is not set");
  http::parse_base_url(config_.base_url);
}

std::size_t HttpEmbeddingProvider::dimension() const { return dimension_; }

std::vector<Vector> HttpEmbeddingProvider::request(const std::vector<std::string>& inputs) {
  using nlohmann::json;
  const json body = {{"model", config_.model}, {"input", inputs}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

  const auto res = http::post_json(http::parse_base_url(config_.base_url), "/v1/embeddings", body.dump(), headers,
                                   config_.timeout);
  if (!res.ok) throw Error(Errc::ProviderFailure, "embedding request failed: " + res.error);
  if (res.response.status < 200 || res.response.status >= 300) {
    throw Error(Errc::ProviderFailure, "embedding endpoint returned HTTP " + std::to_string(res.response.status));
  }
  try {
    const auto doc = json::parse(res.response.body);
    const auto& data = doc.at("data");
    std::vector<Vector> out(inputs.size());
    if (data.size() != inputs.size()) {
      throw Error(Errc::ProviderFailure, "expected " + std::to_string(inputs.size()) + " embeddings, got " +
                                               std::to_string(data.size()));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t slot = data[i].contains("index") ? data[i].at("index").get<std::size_t>() : i;
      if (slot >= out.size()) throw Error(Errc::ProviderFailure, "embedding index out of range");
      out[slot] = data[i].at("embedding").get<Vector>();
    }
    if (!out.empty()) dimension_ = out.front().size();
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::ProviderFailure, std::string("embedding response: ") + e.what());
  }
}

std::vector<Vector> HttpEmbeddingProvider::embed_tokens(std::span<const std::string> tokens) {
  return request(std::vector<std::string>(tokens.begin(), tokens.end()));
}

Vector HttpEmbeddingProvider::embed_text(std::string_view text) {
  auto out = request({std::string(text)});
  return std::move(out.front());
}

}  // namespace ats
