#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "ats/chat.hpp"
#include "ats/embedding.hpp"
#include "ats/termkb.hpp"

namespace ats::cli {

using Env = std::function<std::optional<std::string>(std::string_view)>;

Env process_env();

struct RunConfig {
  std::filesystem::path prompts_dir;
  ChatConfig chat;
  EmbeddingConfig embed;
  termkb::NerConfig ner;
  std::string strategy = "lexicon";
  std::size_t max_n = 4;
  std::size_t k = 3;
  std::size_t parallel = 4;
  std::uint64_t seed = 0;

  /// Sets one dotted key such as "llm.base_url". Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  /// Sorted key=value lines without secrets.
  std::string canonical() const;
  std::string hash() const;
};

/// Environment variable for a config key, if it has one.
std::optional<std::string_view> env_name(std::string_view key);

/// Defaults, then the key=value file, then environment overrides.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const Env& env);

std::filesystem::path default_prompts_dir();

}  // namespace ats::cli
