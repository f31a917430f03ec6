#include "mhrag/providers.hpp"

#include <atomic>
#include <cstdlib>
#include <unistd.h>

#include <json.hpp>

#include "mhrag/error.hpp"
#include "mhrag/interchange.hpp"

namespace mhrag {

std::vector<QueryEmbedding> EmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<QueryEmbedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

FileEmbeddingProvider::FileEmbeddingProvider(std::vector<QueryEmbedding> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!entries_[i].id.empty()) by_id_.emplace(entries_[i].id, i);
    if (!entries_[i].text.empty()) by_text_.emplace(entries_[i].text, i);
  }
}

FileEmbeddingProvider::FileEmbeddingProvider(const std::filesystem::path& path)
    : FileEmbeddingProvider(read_query_embeddings(path)) {}

QueryEmbedding FileEmbeddingProvider::embed(std::string_view key) {
  const std::string k(key);
  if (auto it = by_id_.find(k); it != by_id_.end()) return entries_[it->second];
  if (auto it = by_text_.find(k); it != by_text_.end()) return entries_[it->second];
  throw DataError("no precomputed embedding for '" + k + "'");
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::filesystem::path unique_temp_path(std::string_view stem) {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         (std::string(stem) + "-" + std::to_string(::getpid()) + "-" +
          std::to_string(counter++) + ".jsonl");
}

}  // namespace

CommandEmbeddingProvider::CommandEmbeddingProvider(std::string command)
    : command_(std::move(command)) {
  if (command_.empty()) throw UsageError("embedding command must not be empty");
}

QueryEmbedding CommandEmbeddingProvider::embed(std::string_view text) {
  std::string t(text);
  return embed_batch(std::span<const std::string>(&t, 1)).front();
}

std::vector<QueryEmbedding> CommandEmbeddingProvider::embed_batch(
    std::span<const std::string> texts) {
  const auto input = unique_temp_path("mhrag-embed-in");
  const auto output = unique_temp_path("mhrag-embed-out");
  std::string lines;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = "q" + std::to_string(i);
    j["text"] = texts[i];
    lines += j.dump() + "\n";
  }
  write_text_file(input, lines);

  const std::string cmd = command_ + " --input " + shell_quote(input.string()) + " --output " +
                          shell_quote(output.string()) + " --query-mode";
  const int rc = std::system(cmd.c_str());
  std::filesystem::remove(input);
  if (rc != 0) {
    std::filesystem::remove(output);
    throw ExternalServiceError("embedding command failed (status " + std::to_string(rc) +
                               "): " + command_);
  }
  std::vector<QueryEmbedding> result;
  try {
    result = read_query_embeddings(output);
  } catch (const DataError& e) {
    std::filesystem::remove(output);
    throw ExternalServiceError(std::string("embedding command produced bad output: ") + e.what());
  }
  std::filesystem::remove(output);
  if (result.size() != texts.size()) {
    throw ExternalServiceError("embedding command returned " + std::to_string(result.size()) +
                               " embeddings for " + std::to_string(texts.size()) + " texts");
  }
  for (std::size_t i = 0; i < texts.size(); ++i) result[i].text = texts[i];
  return result;
}

}  // namespace mhrag
