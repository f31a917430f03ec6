#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mhrag/providers.hpp"

namespace mhrag {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

/// Minimal chat-completion interface. Implementations throw
/// ExternalServiceError carrying the provider's message on failure.
class ChatCompletionClient {
 public:
  virtual ~ChatCompletionClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

struct LlmSettings {
  /// Base URL of an OpenAI-compatible API; requests go to <endpoint>/chat/completions.
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  /// Name of the environment variable holding the API key. When the variable
  /// is unset no Authorization header is sent.
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int timeout_seconds = 120;
};

class HttpChatClient : public ChatCompletionClient {
 public:
  explicit HttpChatClient(LlmSettings settings);
  std::string complete(const std::vector<ChatMessage>& messages) override;

  /// Request body sent for `messages` (exposed for tests).
  std::string request_body(const std::vector<ChatMessage>& messages) const;

 private:
  LlmSettings settings_;
  std::string scheme_host_port_;
  std::string base_path_;
};

/// Asks the LLM for `num_questions` questions about a query, one per line.
class LlmQuestionGenerator : public QuestionGenerator {
 public:
  explicit LlmQuestionGenerator(ChatCompletionClient& client) : client_(client) {}
  std::vector<std::string> generate(std::string_view query_text,
                                    std::size_t num_questions) override;

  static std::string build_prompt(std::string_view query_text, std::size_t num_questions);
  /// Splits a reply into questions: one per non-empty line, leading list
  /// markers ("1.", "-", "*") removed.
  static std::vector<std::string> parse_reply(std::string_view reply);

 private:
  ChatCompletionClient& client_;
};

}  // namespace mhrag
