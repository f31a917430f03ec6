#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mhrag/error.hpp"
#include "mhrag/parallel.hpp"
#include "mhrag_cli/commands.hpp"

namespace {

using namespace mhrag;
using namespace mhrag::cli;

void add_llm_options(CLI::App* cmd, LlmSettings& llm) {
  cmd->add_option("--llm-endpoint", llm.endpoint, "Base URL of an OpenAI-compatible API");
  cmd->add_option("--llm-model", llm.model, "Chat model name");
  cmd->add_option("--llm-key-env", llm.api_key_env,
                  "Environment variable holding the API key");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-head embedding retrieval toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mhrag 0.1.0");

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Build a store from a JSONL corpus");
  c_ingest->add_option("--corpus", ingest.corpus, "records.jsonl")->required();
  c_ingest->add_option("--manifest", ingest.manifest,
                       "Manifest file (default: manifest.json beside the corpus)");
  c_ingest->add_option("--store", ingest.store, "Store directory")->required();
  c_ingest->add_flag("--force", ingest.force, "Overwrite an existing store");

  ScoreOptions score;
  score.jobs = default_jobs();
  auto* c_score = app.add_subcommand("score", "Compute per-space importance scores");
  c_score->add_option("--store", score.store, "Store directory")->required();
  c_score->add_option("--out", score.output, "Output file (default: <store>/scores.json)");
  c_score->add_option("--sample", score.sample_size, "Number of sampled ordered pairs");
  c_score->add_option("--seed", score.seed, "Sampling seed");
  c_score->add_option("--jobs", score.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_score->add_flag("--force", score.force, "Overwrite an existing scores file");

  QueryOptions query;
  auto* c_query = app.add_subcommand("query", "Retrieve chunks for one query");
  c_query->add_option("--store", query.store, "Store directory")->required();
  c_query->add_option("--strategy", query.strategy, "Strategy, e.g. mrag or fusion:mrag");
  c_query->add_option("--k", query.k, "Number of chunks to return");
  c_query->add_option("--c", query.c, "Per-space list length (default: k)");
  c_query->add_option("--scores", query.scores, "Scores file (default: <store>/scores.json)");
  c_query->add_option("--embedding", query.embedding_file, "Query embeddings JSONL");
  c_query->add_option("--query-id", query.query_id, "Query to pick from --embedding");
  c_query->add_option("--text", query.text, "Query text");
  c_query->add_option("--embed-cmd", query.embed_command, "Embedding extractor command");
  c_query->add_option("--num-questions", query.num_questions, "Fusion question count");
  add_llm_options(c_query, query.llm);

  std::string config_path;
  RunConfig overrides;
  std::string strategies;
  std::vector<std::size_t> k_values;
  std::string store_dir;
  std::string queries;
  std::string query_embeddings;
  std::string embed_command;
  std::string scores;
  std::string results_dir;
  double w = 0.0;
  std::size_t jobs = 0;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  LlmSettings llm;
  bool eval_force = false;
  auto* c_eval = app.add_subcommand("evaluate", "Run an evaluation sweep");
  auto* o_config = c_eval->add_option("--config", config_path, "TOML run configuration");
  auto* o_store = c_eval->add_option("--store", store_dir, "Store directory");
  auto* o_queries = c_eval->add_option("--queries", queries, "Evaluation queries JSONL");
  auto* o_qemb =
      c_eval->add_option("--query-embeddings", query_embeddings, "Query embeddings JSONL");
  auto* o_cmd = c_eval->add_option("--embed-cmd", embed_command, "Embedding extractor command");
  auto* o_scores = c_eval->add_option("--scores", scores, "Scores file");
  auto* o_out = c_eval->add_option("--out", results_dir, "Results directory");
  auto* o_strat = c_eval->add_option("--strategies", strategies,
                                     "Comma-separated strategies, e.g. standard,mrag,fusion:mrag");
  auto* o_k = c_eval->add_option("--k", k_values, "k values, comma-separated")->delimiter(',');
  auto* o_w = c_eval->add_option("--w", w, "Metric weight");
  auto* o_jobs = c_eval->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* o_sample = c_eval->add_option("--sample", sample, "Sampled pairs when scoring");
  auto* o_seed = c_eval->add_option("--seed", seed, "Scoring seed");
  auto* o_endpoint = c_eval->add_option("--llm-endpoint", llm.endpoint, "LLM API base URL");
  auto* o_model = c_eval->add_option("--llm-model", llm.model, "Chat model name");
  auto* o_keyenv = c_eval->add_option("--llm-key-env", llm.api_key_env, "API key variable");
  c_eval->add_flag("--force", eval_force, "Overwrite existing results");

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "Aggregate results and compare strategies");
  c_report->add_option("--results", report.results, "results.csv")->required();
  c_report->add_option("--out", report.output_dir, "Output directory (default: <results>/report)");
  c_report->add_option("--baseline", report.baseline, "Baseline strategy tag");
  c_report->add_flag("--plots", report.plots, "Also write SVG plots");
  c_report->add_flag("--force", report.force, "Overwrite existing outputs");

  GenPlantedOptions planted;
  auto* c_planted = app.add_subcommand("gen-planted", "Generate a planted synthetic experiment");
  c_planted->add_option("--out", planted.output_dir, "Output directory")->required();
  c_planted->add_option("--heads", planted.h, "Number of embedding spaces");
  c_planted->add_option("--d-head", planted.d_head, "Dimension per space");
  c_planted->add_option("--categories", planted.categories, "Number of categories");
  c_planted->add_option("--docs", planted.docs_per_category, "Documents per category");
  c_planted->add_option("--sigma", planted.sigma, "Cluster spread (absolute)");
  c_planted->add_option("--sigma-fraction", planted.sigma_fraction,
                        "Cluster spread as a fraction of the center separation");
  c_planted->add_option("--identity-scale", planted.identity_scale, "Document identity offset");
  c_planted->add_option("--salience-gain", planted.salience_gain, "Gain on the salient space");
  c_planted->add_option("--seed", planted.seed, "Corpus and query seed");
  c_planted->add_option("--mixing-seed", planted.mixing_seed, "Seed of the standard-vector map");
  c_planted->add_option("--aspects", planted.aspect_counts, "Aspect counts")->delimiter(',');
  c_planted->add_option("--queries-per-count", planted.queries_per_count, "Queries per count");
  c_planted->add_option("--query-noise", planted.query_noise, "Query embedding noise");
  c_planted->add_flag("--force", planted.force, "Overwrite existing outputs");

  GenQueriesOptions gen;
  auto* c_gen = app.add_subcommand("gen-queries", "Generate multi-aspect story queries with an LLM");
  c_gen->add_option("--documents", gen.documents, "Documents JSONL")->required();
  c_gen->add_option("--out", gen.output, "Output queries JSONL")->required();
  c_gen->add_option("--flagged", gen.flagged, "Flagged queries JSONL");
  c_gen->add_option("--aspects", gen.aspect_counts, "Aspect counts")->delimiter(',');
  c_gen->add_option("--queries-per-count", gen.queries_per_count, "Queries per count");
  c_gen->add_option("--seed", gen.seed, "Sampling seed");
  c_gen->add_option("--min-chars", gen.min_chars, "Minimum document length");
  c_gen->add_option("--max-attempts", gen.max_attempts, "LLM attempts per query");
  c_gen->add_option("--min-length", gen.min_length, "Minimum story length");
  c_gen->add_option("--parallel", gen.parallelism, "Concurrent LLM requests");
  add_llm_options(c_gen, gen.llm);
  c_gen->add_flag("--force", gen.force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_ingest->parsed()) {
      cmd_ingest(ingest, std::cout);
    } else if (c_score->parsed()) {
      cmd_score(score, std::cout);
    } else if (c_query->parsed()) {
      cmd_query(query, std::cout);
    } else if (c_eval->parsed()) {
      RunConfig cfg = o_config->count() > 0
                          ? load_run_config(config_path)
                          : parse_run_config("", std::filesystem::current_path());
      if (o_store->count() > 0) cfg.store_dir = store_dir;
      if (o_queries->count() > 0) cfg.queries = queries;
      if (o_qemb->count() > 0) cfg.query_embeddings = query_embeddings;
      if (o_cmd->count() > 0) cfg.embed_command = embed_command;
      if (o_scores->count() > 0) cfg.scores = scores;
      if (o_out->count() > 0) cfg.results_dir = results_dir;
      if (o_strat->count() > 0) cfg.strategies = parse_strategy_list(strategies);
      if (o_k->count() > 0) cfg.k_values = k_values;
      if (o_w->count() > 0) cfg.w = w;
      if (o_jobs->count() > 0) cfg.jobs = jobs;
      if (o_sample->count() > 0) cfg.sample_size = sample;
      if (o_seed->count() > 0) cfg.seed = seed;
      if (o_endpoint->count() > 0) cfg.llm.endpoint = llm.endpoint;
      if (o_model->count() > 0) cfg.llm.model = llm.model;
      if (o_keyenv->count() > 0) cfg.llm.api_key_env = llm.api_key_env;
      if (cfg.strategies.empty()) cfg.strategies = parse_strategy_list("standard,mrag,split");
      cmd_evaluate(cfg, eval_force, std::cout);
    } else if (c_report->parsed()) {
      cmd_report(report, std::cout);
    } else if (c_planted->parsed()) {
      cmd_gen_planted(planted, std::cout);
    } else if (c_gen->parsed()) {
      cmd_gen_queries(gen, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "mhrag: error: " << e.what() << '\n';
    return 1;
  } catch (const ExternalServiceError& e) {
    std::cerr << "mhrag: error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "mhrag: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
