#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ats {

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct ChatReply {
  std::string text;
  bool refusal = false;
};

std::vector<std::string> default_refusal_patterns();

/// Case-insensitive prefix match of the trimmed content against `patterns`;
/// empty content is always a refusal.
bool is_refusal(std::string_view content, std::span<const std::string> patterns);

/// Optional leading system message, then strictly alternating user/assistant
/// turns ending with a user turn.
void validate_messages(std::span<const Message> messages);

/// Front for chat models. Subclasses supply the raw completion; validation
/// and refusal classification happen here so every backend behaves alike.
class ChatClient {
 public:
  explicit ChatClient(std::vector<std::string> refusal_patterns = default_refusal_patterns())
      : refusal_patterns_(std::move(refusal_patterns)) {}
  virtual ~ChatClient() = default;

  ChatReply chat(std::span<const Message> messages);

  virtual std::string model_id() const = 0;
  const std::vector<std::string>& refusal_patterns() const { return refusal_patterns_; }

 protected:
  /// Assistant content for a validated conversation. Must be safe to call concurrently.
  virtual std::string complete(std::span<const Message> messages) = 0;

 private:
  std::vector<std::string> refusal_patterns_;
};

struct ChatConfig {
  std::string base_url;
  std::string model_id;
  std::string api_key;
  double temperature = 0.0;
  std::chrono::milliseconds request_timeout{60000};
  std::size_t max_parallel = 4;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::vector<std::string> refusal_patterns = default_refusal_patterns();
};

/// OpenAI-compatible `POST {base_url}/v1/chat/completions` client.
/// Connection failures and 5xx responses are retried with exponential
/// backoff and reported as Errc::Transport once attempts run out.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(ChatConfig config);

  std::string model_id() const override { return config_.model_id; }
  const ChatConfig& config() const { return config_; }

 protected:
  std::string complete(std::span<const Message> messages) override;

 private:
  ChatConfig config_;
};

}  // namespace ats
