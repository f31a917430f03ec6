#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mhrag/llm.hpp"
#include "mhrag_cli/run_config.hpp"

namespace mhrag::cli {

// Every command writes data to `out` and throws mhrag::Error subclasses on
// failure. Existing outputs are only replaced when `force` is set.

struct IngestOptions {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> manifest;  // default: manifest.json next to corpus
  std::filesystem::path store;
  bool force = false;
};
void cmd_ingest(const IngestOptions& options, std::ostream& out);

struct ScoreOptions {
  std::filesystem::path store;
  std::optional<std::filesystem::path> output;  // default: <store>/scores.json
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool force = false;
};
void cmd_score(const ScoreOptions& options, std::ostream& out);

struct QueryOptions {
  std::filesystem::path store;
  std::string strategy = "mrag";
  std::size_t k = 10;
  std::optional<std::size_t> c;
  std::size_t num_questions = 3;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> embedding_file;
  std::optional<std::string> query_id;
  std::optional<std::string> text;
  std::optional<std::string> embed_command;
  LlmSettings llm;
};
/// Prints "id<TAB>weight" lines, best first.
void cmd_query(const QueryOptions& options, std::ostream& out);

/// Writes <results_dir>/results.csv and aggregate.csv (plus failures.jsonl
/// when some queries could not be embedded) and prints mean metrics per
/// strategy.
void cmd_evaluate(const RunConfig& config, bool force, std::ostream& out);

struct ReportOptions {
  std::filesystem::path results;
  std::optional<std::filesystem::path> output_dir;  // default: <results dir>/report
  std::string baseline = "standard";
  bool plots = false;
  bool force = false;
};
void cmd_report(const ReportOptions& options, std::ostream& out);

struct GenPlantedOptions {
  std::filesystem::path output_dir;
  std::size_t h = 8;
  std::size_t d_head = 16;
  std::size_t categories = 25;
  std::size_t docs_per_category = 50;
  std::optional<double> sigma;
  double sigma_fraction = 0.5;  // of the center separation, used when sigma is unset
  double identity_scale = 0.25;
  double salience_gain = 2.0;
  std::uint64_t seed = 42;
  std::uint64_t mixing_seed = 1;
  std::vector<std::size_t> aspect_counts{1, 5, 10, 15, 20};
  std::size_t queries_per_count = 25;
  double query_noise = 0.2;
  bool force = false;
};
/// Writes corpus/{manifest.json,records.jsonl}, queries.jsonl,
/// query_embeddings.jsonl and evaluate.toml under output_dir.
void cmd_gen_planted(const GenPlantedOptions& options, std::ostream& out);

struct GenQueriesOptions {
  std::filesystem::path documents;
  std::filesystem::path output;
  std::optional<std::filesystem::path> flagged;  // default: <output stem>.flagged.jsonl
  std::vector<std::size_t> aspect_counts{1, 5, 10, 15, 20};
  std::size_t queries_per_count = 25;
  std::uint64_t seed = 0;
  std::size_t min_chars = 800;
  std::size_t max_attempts = 3;
  std::size_t min_length = 400;
  std::size_t parallelism = 4;
  LlmSettings llm;
  bool force = false;
};
void cmd_gen_queries(const GenQueriesOptions& options, std::ostream& out);

}  // namespace mhrag::cli
