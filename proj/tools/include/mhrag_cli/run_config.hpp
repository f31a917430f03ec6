#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhrag/llm.hpp"
#include "mhrag/strategies.hpp"

namespace mhrag::cli {

/// Settings for an evaluation run. Loaded from TOML:
///
///   [paths]       store, corpus, queries, query_embeddings, scores, results
///   [evaluation]  k_values, w, jobs
///   [scoring]     sample_size, seed
///   [embedding]   command
///   [llm]         endpoint, model, api_key_env, temperature, timeout_seconds
///   [[strategy]]  kind, c, num_questions, base
///
/// Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::filesystem::path store_dir;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> queries;
  std::optional<std::filesystem::path> query_embeddings;
  std::optional<std::filesystem::path> scores;
  std::filesystem::path results_dir = "results";
  std::optional<std::string> embed_command;

  std::vector<StrategyConfig> strategies;
  std::vector<std::size_t> k_values{10, 15, 20, 25, 30};
  double w = 2.0;
  std::optional<std::size_t> jobs;

  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;

  LlmSettings llm;

  /// Scores sidecar location: `scores` or <store_dir>/scores.json.
  std::filesystem::path scores_path() const;
  /// Checks values and that every input path exists.
  void validate() const;
};

RunConfig parse_run_config(std::string_view toml_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses "kind" or "fusion:base", e.g. "mrag", "fusion:split".
StrategyConfig parse_strategy_spec(std::string_view spec);
/// Comma-separated list of strategy specs.
std::vector<StrategyConfig> parse_strategy_list(std::string_view specs);

}  // namespace mhrag::cli
