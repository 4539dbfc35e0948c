#include "config.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <map>
#include <utility>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/textproc.hpp"

namespace ats::cli {
namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kEnvNames{{
    {"llm.base_url", "ATS_LLM_BASE_URL"},
    {"llm.model", "ATS_LLM_MODEL"},
    {"llm.api_key", "ATS_LLM_API_KEY"},
    {"llm.temperature", "ATS_LLM_TEMPERATURE"},
    {"llm.timeout_ms", "ATS_LLM_TIMEOUT_MS"},
    {"llm.max_attempts", "ATS_LLM_MAX_ATTEMPTS"},
    {"llm.backoff_ms", "ATS_LLM_BACKOFF_MS"},
    {"embed.base_url", "ATS_EMBED_BASE_URL"},
    {"embed.model", "ATS_EMBED_MODEL"},
    {"embed.api_key", "ATS_EMBED_API_KEY"},
    {"embed.timeout_ms", "ATS_EMBED_TIMEOUT_MS"},
    {"ner.base_url", "ATS_NER_BASE_URL"},
    {"ner.timeout_ms", "ATS_NER_TIMEOUT_MS"},
    {"prompts_dir", "ATS_PROMPTS_DIR"},
}};

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(Errc::ConfigError, std::string(key) + ": '" + std::string(value) + "' is not a number");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string s(value);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(Errc::ConfigError, std::string(key) + ": '" + s + "' is not a number");
  }
  return v;
}

std::size_t positive(std::string_view key, std::string_view value) {
  const auto v = parse_number<std::size_t>(key, value);
  if (v == 0) throw Error(Errc::ConfigError, std::string(key) + " must be >= 1");
  return v;
}

}  // namespace

Env process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    if (const char* v = std::getenv(std::string(name).c_str())) return std::string(v);
    return std::nullopt;
  };
}

std::optional<std::string_view> env_name(std::string_view key) {
  for (const auto& [k, e] : kEnvNames) {
    if (k == key) return e;
  }
  return std::nullopt;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value(text::trim(raw));
  using std::chrono::milliseconds;
  if (key == "llm.base_url") chat.base_url = value;
  else if (key == "llm.model") chat.model_id = value;
  else if (key == "llm.api_key") chat.api_key = value;
  else if (key == "llm.temperature") chat.temperature = parse_double(key, value);
  else if (key == "llm.timeout_ms") chat.request_timeout = milliseconds(positive(key, value));
  else if (key == "llm.max_attempts") chat.max_attempts = static_cast<int>(positive(key, value));
  else if (key == "llm.backoff_ms") chat.initial_backoff = milliseconds(parse_number<std::size_t>(key, value));
  else if (key == "embed.base_url") embed.base_url = value;
  else if (key == "embed.model") embed.model = value;
  else if (key == "embed.api_key") embed.api_key = value;
  else if (key == "embed.timeout_ms") embed.timeout = milliseconds(positive(key, value));
  else if (key == "ner.base_url") ner.base_url = value;
  else if (key == "ner.timeout_ms") ner.timeout = milliseconds(positive(key, value));
  else if (key == "prompts_dir") prompts_dir = value;
  else if (key == "strategy") strategy = std::string(termkb::to_string(termkb::strategy_from_string(value)));
  else if (key == "max_n") max_n = positive(key, value);
  else if (key == "k") k = positive(key, value);
  else if (key == "parallel") {
    parallel = positive(key, value);
    chat.max_parallel = parallel;
  } else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else throw Error(Errc::ConfigError, "unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"llm.base_url", chat.base_url},
      {"llm.model", chat.model_id},
      {"llm.temperature", io::format_double(chat.temperature)},
      {"llm.max_attempts", std::to_string(chat.max_attempts)},
      {"embed.base_url", embed.base_url},
      {"embed.model", embed.model},
      {"ner.base_url", ner.base_url},
      {"strategy", strategy},
      {"max_n", std::to_string(max_n)},
      {"k", std::to_string(k)},
      {"parallel", std::to_string(parallel)},
      {"seed", std::to_string(seed)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + '=' + v + '\n';
  return out;
}

std::string RunConfig::hash() const { return io::sha256_hex(canonical()); }

std::filesystem::path default_prompts_dir() {
  namespace fs = std::filesystem;
  for (const fs::path& p : {fs::path(ATS_SOURCE_PROMPTS_DIR), fs::path(ATS_INSTALLED_PROMPTS_DIR)}) {
    if (fs::is_directory(p)) return p;
  }
  return ATS_SOURCE_PROMPTS_DIR;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const Env& env) {
  RunConfig cfg;
  cfg.prompts_dir = default_prompts_dir();
  if (file) {
    if (!std::filesystem::exists(*file)) throw Error(Errc::ConfigError, file->string() + " does not exist");
    std::size_t lineno = 0;
    const std::string contents = io::read_file(*file);
    std::string_view rest = contents;
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      std::string_view line = text::trim(rest.substr(0, nl));
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      ++lineno;
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(Errc::ConfigError, file->string() + ":" + std::to_string(lineno) + ": expected key = value");
      }
      cfg.set(text::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
  }
  for (const auto& [key, name] : kEnvNames) {
    if (auto v = env(name)) cfg.set(key, *v);
  }
  return cfg;
}

}  // namespace ats::cli
