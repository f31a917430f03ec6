#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mhrag/types.hpp"

namespace mhrag {

/// Turns query texts into multi-aspect (and, when available, standard)
/// embeddings.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual QueryEmbedding embed(std::string_view text) = 0;
  /// Batched form; the default calls embed() per text.
  virtual std::vector<QueryEmbedding> embed_batch(std::span<const std::string> texts);
};

/// Produces follow-up questions about a query for Fusion retrieval.
class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::vector<std::string> generate(std::string_view query_text,
                                            std::size_t num_questions) = 0;
};

/// Serves precomputed query embeddings (extractor output in query mode).
/// Lookup is by id first, then by text.
class FileEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FileEmbeddingProvider(std::vector<QueryEmbedding> entries);
  explicit FileEmbeddingProvider(const std::filesystem::path& path);

  QueryEmbedding embed(std::string_view key) override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<QueryEmbedding> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_text_;
};

/// Runs an external extractor command as
///   <command> --input <texts.jsonl> --output <embeddings.jsonl> --query-mode
/// and reads back one embedding per input line, in order. Input lines are
/// {"id": "q<i>", "text": ...}.
class CommandEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit CommandEmbeddingProvider(std::string command);

  QueryEmbedding embed(std::string_view text) override;
  std::vector<QueryEmbedding> embed_batch(std::span<const std::string> texts) override;

 private:
  std::string command_;
};

}  // namespace mhrag
