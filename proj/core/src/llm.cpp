#include "mhrag/llm.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "mhrag/error.hpp"

namespace mhrag {

HttpChatClient::HttpChatClient(LlmSettings settings) : settings_(std::move(settings)) {
  const auto& url = settings_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("LLM endpoint must be an absolute URL: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

std::string HttpChatClient::request_body(const std::vector<ChatMessage>& messages) const {
  nlohmann::ordered_json body;
  body["model"] = settings_.model;
  auto msgs = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    nlohmann::ordered_json jm;
    jm["role"] = m.role;
    jm["content"] = m.content;
    msgs.push_back(std::move(jm));
  }
  body["messages"] = std::move(msgs);
  body["temperature"] = settings_.temperature;
  return body.dump();
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(settings_.timeout_seconds, 0);
  client.set_read_timeout(settings_.timeout_seconds, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(settings_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(base_path_ + "/chat/completions", headers, request_body(messages),
                         "application/json");
  if (!res) {
    throw ExternalServiceError("LLM request to " + settings_.endpoint +
                               " failed: " + httplib::to_string(res.error()));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw ExternalServiceError("LLM returned HTTP " + std::to_string(res->status) +
                               " with a non-JSON body: " + res->body.substr(0, 200));
  }
  if (res->status >= 400) {
    std::string message = res->body;
    if (reply.contains("error") && reply["error"].is_object()) {
      message = reply["error"].value("message", message);
    }
    throw ExternalServiceError("LLM returned HTTP " + std::to_string(res->status) + ": " +
                               message);
  }
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ExternalServiceError(std::string("unexpected LLM response shape: ") + e.what());
  }
}

std::string LlmQuestionGenerator::build_prompt(std::string_view query_text,
                                               std::size_t num_questions) {
  std::ostringstream p;
  p << "Write exactly " << num_questions
    << " distinct questions that together cover every topic touched by the text below. "
       "Output only the questions, one per line, without numbering.\n\nText:\n"
    << query_text << "\n";
  return p.str();
}

std::vector<std::string> LlmQuestionGenerator::parse_reply(std::string_view reply) {
  std::vector<std::string> out;
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    std::size_t i = 0;
    auto skip_space = [&] {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    };
    skip_space();
    const std::size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > digits_start && i < line.size() && (line[i] == '.' || line[i] == ')')) {
      ++i;
    } else if (i == digits_start && i < line.size() && (line[i] == '-' || line[i] == '*')) {
      ++i;
    } else {
      i = digits_start;
    }
    skip_space();
    auto end = line.find_last_not_of(" \t\r");
    if (end == std::string::npos || end < i) continue;
    out.push_back(line.substr(i, end - i + 1));
  }
  return out;
}

std::vector<std::string> LlmQuestionGenerator::generate(std::string_view query_text,
                                                        std::size_t num_questions) {
  std::string reply;
  try {
    reply = client_.complete({{"user", build_prompt(query_text, num_questions)}});
  } catch (const std::exception& e) {
    throw QuestionGenerationError(e.what());
  }
  auto questions = parse_reply(reply);
  if (questions.empty()) throw QuestionGenerationError("LLM reply contained no questions");
  if (questions.size() > num_questions) questions.resize(num_questions);
  return questions;
}

}  // namespace mhrag
