#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mhrag/error.hpp"
#include "mhrag/llm.hpp"

using namespace mhrag;

namespace {

/// Local OpenAI-style endpoint recording the last request.
class FakeChatServer {
 public:
  FakeChatServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      res.status = status;
      res.set_content(reply, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  static std::string content_reply(const std::string& content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
    return j.dump();
  }

  int status = 200;
  std::string reply = content_reply("hello");
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

class ScriptedClient : public ChatCompletionClient {
 public:
  explicit ScriptedClient(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override {
    last_prompt = messages.at(0).content;
    return reply_;
  }
  std::string last_prompt;

 private:
  std::string reply_;
};

}  // namespace

TEST(HttpChatClient, SendsChatCompletionRequest) {
  FakeChatServer server;
  LlmSettings settings;
  settings.endpoint = server.endpoint();
  settings.model = "test-model";
  settings.api_key_env = "MHRAG_TEST_KEY_UNSET";
  ::unsetenv("MHRAG_TEST_KEY_UNSET");
  HttpChatClient client(settings);
  EXPECT_EQ(client.complete({{"user", "hi"}}), "hello");
  const auto body = nlohmann::json::parse(server.last_body);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hi");
  EXPECT_EQ(server.last_auth, "");
}

TEST(HttpChatClient, SendsBearerKeyFromEnvironment) {
  FakeChatServer server;
  LlmSettings settings;
  settings.endpoint = server.endpoint() + "/";
  settings.api_key_env = "MHRAG_TEST_KEY";
  ::setenv("MHRAG_TEST_KEY", "secret", 1);
  HttpChatClient client(settings);
  client.complete({{"user", "hi"}});
  EXPECT_EQ(server.last_auth, "Bearer secret");
  ::unsetenv("MHRAG_TEST_KEY");
}

TEST(HttpChatClient, SurfacesProviderErrors) {
  FakeChatServer server;
  server.status = 429;
  server.reply = R"({"error":{"message":"rate limited"}})";
  LlmSettings settings;
  settings.endpoint = server.endpoint();
  HttpChatClient client(settings);
  try {
    client.complete({{"user", "hi"}});
    FAIL() << "expected ExternalServiceError";
  } catch (const ExternalServiceError& e) {
    EXPECT_NE(std::string(e.what()).find("rate limited"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("429"), std::string::npos);
  }
  server.status = 200;
  server.reply = R"({"choices":[]})";
  EXPECT_THROW(client.complete({{"user", "hi"}}), ExternalServiceError);
  server.reply = "not json";
  EXPECT_THROW(client.complete({{"user", "hi"}}), ExternalServiceError);
}

TEST(HttpChatClient, UnreachableEndpointIsExternalError) {
  LlmSettings settings;
  settings.endpoint = "http://127.0.0.1:1/v1";
  settings.timeout_seconds = 2;
  HttpChatClient client(settings);
  EXPECT_THROW(client.complete({{"user", "hi"}}), ExternalServiceError);
  settings.endpoint = "no-scheme";
  EXPECT_THROW(HttpChatClient{settings}, UsageError);
}

TEST(HttpChatClient, RequestBodyIsStable) {
  LlmSettings settings;
  HttpChatClient client(settings);
  EXPECT_EQ(client.request_body({{"system", "s"}, {"user", "u"}}),
            R"({"model":"gpt-3.5-turbo","messages":[{"role":"system","content":"s"},)"
            R"({"role":"user","content":"u"}],"temperature":0.0})");
}

TEST(LlmQuestionGenerator, ParsesListReplies) {
  EXPECT_EQ(LlmQuestionGenerator::parse_reply("1. First?\n2) Second?\n\n - Third?\n* Fourth?\nFifth?\n"),
            (std::vector<std::string>{"First?", "Second?", "Third?", "Fourth?", "Fifth?"}));
  EXPECT_EQ(LlmQuestionGenerator::parse_reply("2024 was a year?"),
            (std::vector<std::string>{"2024 was a year?"}));
  EXPECT_TRUE(LlmQuestionGenerator::parse_reply(" \n\n").empty());
}

TEST(LlmQuestionGenerator, TruncatesToRequestedCount) {
  ScriptedClient client("a?\nb?\nc?\nd?");
  LlmQuestionGenerator gen(client);
  EXPECT_EQ(gen.generate("topic text", 2), (std::vector<std::string>{"a?", "b?"}));
  EXPECT_NE(client.last_prompt.find("topic text"), std::string::npos);
  EXPECT_NE(client.last_prompt.find("exactly 2"), std::string::npos);
}

TEST(LlmQuestionGenerator, FailuresAreQuestionGenerationErrors) {
  ScriptedClient empty("\n");
  LlmQuestionGenerator gen(empty);
  EXPECT_THROW(gen.generate("x", 3), QuestionGenerationError);
  LlmSettings settings;
  settings.endpoint = "http://127.0.0.1:1";
  settings.timeout_seconds = 2;
  HttpChatClient down(settings);
  LlmQuestionGenerator gen2(down);
  EXPECT_THROW(gen2.generate("x", 3), QuestionGenerationError);
}
