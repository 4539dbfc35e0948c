#include "ats/chat.hpp"

#include <thread>

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/textproc.hpp"
#include "http_util.hpp"

namespace ats {
namespace {

// U+2019 RIGHT SINGLE QUOTATION MARK, as models often emit it for apostrophes.
std::string fold_apostrophes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && s.compare(i, 3, "\xE2\x80\x99") == 0) {
      out += '\'';
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> default_refusal_patterns() { return {"I can't", "I cannot", "I'm sorry", ""}; }

bool is_refusal(std::string_view content, std::span<const std::string> patterns) {
  const std::string normalized = text::to_lower_ascii(fold_apostrophes(text::trim(content)));
  if (normalized.empty()) return true;
  for (const auto& p : patterns) {
    if (p.empty()) continue;
    if (normalized.starts_with(text::to_lower_ascii(fold_apostrophes(p)))) return true;
  }
  return false;
}

void validate_messages(std::span<const Message> messages) {
  if (messages.empty()) throw Error(Errc::InvalidMessages, "conversation is empty");
  std::size_t i = 0;
  if (messages[0].role == "system") ++i;
  if (i == messages.size()) throw Error(Errc::InvalidMessages, "conversation has no user turn");
  for (std::size_t k = i; k < messages.size(); ++k) {
    const char* expected = (k - i) % 2 == 0 ? "user" : "assistant";
    if (messages[k].role != expected) {
      throw Error(Errc::InvalidMessages, "message " + std::to_string(k) + " has role '" + messages[k].role +
                                             "', expected '" + expected + "'");
    }
  }
  if (messages.back().role != "user") throw Error(Errc::InvalidMessages, "conversation must end with a user turn");
}

ChatReply ChatClient::chat(std::span<const Message> messages) {
  validate_messages(messages);
  ChatReply reply;
  reply.text = complete(messages);
  reply.refusal = is_refusal(reply.text, refusal_patterns_);
  return reply;
}

HttpChatClient::HttpChatClient(ChatConfig config) : ChatClient(config.refusal_patterns), config_(std::move(config)) {
  if (config_.temperature < 0.0) throw Error(Errc::ConfigError, "temperature must be >= 0");
  if (config_.max_parallel < 1) throw Error(Errc::ConfigError, "max_parallel must be >= 1");
  if (config_.max_attempts < 1) throw Error(Errc::ConfigError, "max_attempts must be >= 1");
  if (config_.model_id.empty()) throw Error(Errc::ConfigError, "chat model id is not set");
  http::parse_base_url(config_.base_url);
}

std::string HttpChatClient::complete(std::span<const Message> messages) {
  using nlohmann::json;
  json body = {{"model", config_.model_id}, {"temperature", config_.temperature}, {"messages", json::array()}};
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  const auto endpoint = http::parse_base_url(config_.base_url);

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    const auto res = http::post_json(endpoint, "/v1/chat/completions", payload, headers, config_.request_timeout);
    if (!res.ok) {
      last_error = "connection failed: " + res.error;
      continue;
    }
    if (res.response.status >= 500) {
      last_error = "HTTP " + std::to_string(res.response.status);
      continue;
    }
    if (res.response.status < 200 || res.response.status >= 300) {
      throw Error(Errc::BadStatus, "HTTP " + std::to_string(res.response.status) + ": " + res.response.body.substr(0, 300));
    }
    try {
      const auto doc = json::parse(res.response.body);
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      if (content.is_null()) return {};
      return content.get<std::string>();
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedResponse, std::string("chat response: ") + e.what());
    }
  }
  throw Error(Errc::Transport, "chat request failed after " + std::to_string(config_.max_attempts) +
                                   " attempts: " + last_error);
}

}  // namespace ats
