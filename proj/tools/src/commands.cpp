#include "mhrag_cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "mhrag/datagen.hpp"
#include "mhrag/error.hpp"
#include "mhrag/evaluation.hpp"
#include "mhrag/interchange.hpp"
#include "mhrag/parallel.hpp"
#include "mhrag/planted.hpp"
#include "mhrag/providers.hpp"
#include "mhrag/report.hpp"
#include "mhrag/scoring.hpp"
#include "mhrag/store.hpp"

namespace mhrag::cli {

namespace fs = std::filesystem;

namespace {

void refuse_overwrite(std::initializer_list<fs::path> paths, bool force) {
  if (force) return;
  for (const auto& p : paths) {
    if (fs::exists(p)) {
      throw UsageError("'" + p.string() + "' already exists; pass --force to overwrite");
    }
  }
}

bool needs_scores(const StrategyConfig& s) {
  if (s.kind == StrategyKind::fusion) return needs_scores(*s.base);
  return s.kind == StrategyKind::mrag;
}

bool needs_split(const StrategyConfig& s) {
  if (s.kind == StrategyKind::fusion) return needs_split(*s.base);
  return uses_split_store(s.kind);
}

bool needs_split_scores(const StrategyConfig& s) {
  if (s.kind == StrategyKind::fusion) return needs_split_scores(*s.base);
  return s.kind == StrategyKind::split || s.kind == StrategyKind::split2;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

/// Store plus whatever derived data the requested strategies need.
struct Workspace {
  MultiSpaceStore store;
  std::optional<HeadScores> scores;
  std::optional<MultiSpaceStore> split;
  std::optional<HeadScores> split_scores;

  RetrievalContext context() const {
    RetrievalContext ctx;
    ctx.store = &store;
    ctx.scores = scores ? &*scores : nullptr;
    ctx.split = split ? &*split : nullptr;
    ctx.split_scores = split_scores ? &*split_scores : nullptr;
    return ctx;
  }
};

Workspace prepare(const fs::path& store_dir, std::span<const StrategyConfig> strategies,
                  const std::optional<fs::path>& scores_file,
                  std::optional<std::size_t> sample_size, std::uint64_t seed, std::size_t jobs) {
  Workspace ws{read_store(store_dir), std::nullopt, std::nullopt, std::nullopt};
  bool want_scores = false;
  bool want_split = false;
  bool want_split_scores = false;
  for (const auto& s : strategies) {
    want_scores = want_scores || needs_scores(s);
    want_split = want_split || needs_split(s);
    want_split_scores = want_split_scores || needs_split_scores(s);
  }
  if (want_scores) {
    const fs::path path = scores_file.value_or(store_dir / "scores.json");
    if (fs::exists(path)) {
      ws.scores = read_scores(path);
      if (ws.scores->size() != ws.store.space_count()) {
        throw DataError(path.string() + ": " + std::to_string(ws.scores->size()) +
                        " scores for " + std::to_string(ws.store.space_count()) + " spaces");
      }
    } else {
      std::cerr << "mhrag: no scores at '" << path.string() << "', computing them\n";
      ws.scores = compute_scores(ws.store, sample_size, seed, jobs);
    }
  }
  if (want_split) {
    ws.split = split_store(ws.store);
    if (want_split_scores) ws.split_scores = compute_scores(*ws.split, sample_size, seed, jobs);
  }
  return ws;
}

void print_summary(std::ostream& out, const MultiSpaceStore& store) {
  out << store.size() << " chunks, h=" << store.manifest().h
      << ", d_head=" << store.manifest().d_head << '\n';
}

}  // namespace

void cmd_ingest(const IngestOptions& options, std::ostream& out) {
  const fs::path manifest_path =
      options.manifest.value_or(options.corpus.parent_path() / "manifest.json");
  refuse_overwrite({options.store / "manifest.json", options.store / "records.jsonl"},
                   options.force);
  const auto manifest = read_manifest(manifest_path);
  auto records = read_records(options.corpus);
  MultiSpaceStore store = [&] {
    try {
      return ingest(manifest, std::move(records));
    } catch (const DataError& e) {
      throw DataError(options.corpus.string() + ": " + e.what());
    }
  }();
  write_store(options.store, store);
  fs::remove(options.store / "scores.json");
  print_summary(out, store);
}

void cmd_score(const ScoreOptions& options, std::ostream& out) {
  const fs::path path = options.output.value_or(options.store / "scores.json");
  refuse_overwrite({path}, options.force);
  const auto store = read_store(options.store);
  if (store.empty()) throw DataError("store '" + options.store.string() + "' is empty");
  const auto scores = compute_scores(store, options.sample_size, options.seed, options.jobs);
  write_scores(path, scores);
  out << "space\ta\tb\ts\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << i << '\t' << format_double(scores.a[i]) << '\t' << format_double(scores.b[i]) << '\t'
        << format_double(scores.s[i]) << '\n';
  }
}

void cmd_query(const QueryOptions& options, std::ostream& out) {
  StrategyConfig config = parse_strategy_spec(options.strategy);
  config.k = options.k;
  if (config.kind == StrategyKind::fusion) {
    StrategyConfig base = *config.base;
    base.k = options.k;
    base.c = options.c;
    config.base = std::make_shared<const StrategyConfig>(std::move(base));
    config.num_questions = options.num_questions;
  } else {
    config.c = options.c;
  }
  config.validate();

  std::optional<CommandEmbeddingProvider> command;
  if (options.embed_command) command.emplace(*options.embed_command);

  QueryEmbedding query;
  if (options.embedding_file) {
    const auto entries = read_query_embeddings(*options.embedding_file);
    const QueryEmbedding* found = nullptr;
    for (const auto& e : entries) {
      if ((options.query_id && e.id == *options.query_id) ||
          (!options.query_id && options.text && e.text == *options.text)) {
        found = &e;
        break;
      }
    }
    if (!options.query_id && !options.text) {
      if (entries.size() != 1) {
        throw UsageError("'" + options.embedding_file->string() + "' holds " +
                         std::to_string(entries.size()) + " queries; pick one with --query-id");
      }
      found = &entries.front();
    }
    if (found == nullptr) throw DataError("query not found in '" + options.embedding_file->string() + "'");
    query = *found;
  } else if (options.text && command) {
    query = command->embed(*options.text);
    query.text = *options.text;
  } else {
    throw UsageError("a query needs --embedding, or --text with --embed-cmd");
  }

  const std::vector<StrategyConfig> strategies{config};
  const auto ws = prepare(options.store, strategies, options.scores, std::nullopt, 0, 1);
  auto ctx = ws.context();

  std::optional<HttpChatClient> chat;
  std::optional<LlmQuestionGenerator> questions;
  if (config.kind == StrategyKind::fusion) {
    if (!command) throw UsageError("fusion needs --embed-cmd to embed generated questions");
    chat.emplace(options.llm);
    questions.emplace(*chat);
    ctx.questions = &*questions;
    ctx.embedder = &*command;
  }

  const auto ranked = retrieve(ctx, config, query);
  for (const auto& e : ranked.entries) out << e.id << '\t' << format_double(e.weight) << '\n';
}

void cmd_evaluate(const RunConfig& config, bool force, std::ostream& out) {
  config.validate();
  const fs::path results_csv = config.results_dir / "results.csv";
  const fs::path aggregate_csv = config.results_dir / "aggregate.csv";
  const fs::path failures_jsonl = config.results_dir / "failures.jsonl";
  refuse_overwrite({results_csv, aggregate_csv}, force);

  const std::size_t jobs = config.jobs.value_or(default_jobs());
  const auto queries = read_eval_queries(*config.queries);
  const auto ws =
      prepare(config.store_dir, config.strategies, config.scores, config.sample_size, config.seed,
              jobs);
  auto ctx = ws.context();

  std::unique_ptr<EmbeddingProvider> embedder;
  if (config.query_embeddings) {
    embedder = std::make_unique<FileEmbeddingProvider>(*config.query_embeddings);
  } else {
    embedder = std::make_unique<CommandEmbeddingProvider>(*config.embed_command);
  }

  std::optional<HttpChatClient> chat;
  std::optional<LlmQuestionGenerator> questions;
  for (const auto& s : config.strategies) {
    if (s.kind != StrategyKind::fusion || questions) continue;
    chat.emplace(config.llm);
    questions.emplace(*chat);
    ctx.questions = &*questions;
    ctx.embedder = embedder.get();
  }

  const auto table = run_evaluation(ctx, queries, config.strategies, config.k_values, *embedder,
                                    EvalOptions{config.w, jobs});

  std::ostringstream results;
  write_results_csv(results, table.rows);
  write_text_file(results_csv, results.str());
  std::ostringstream agg;
  write_aggregate_csv(agg, aggregate(table.rows));
  write_text_file(aggregate_csv, agg.str());

  if (table.failures.empty()) {
    fs::remove(failures_jsonl);
  } else {
    std::string lines;
    for (const auto& f : table.failures) {
      nlohmann::ordered_json j;
      j["query_id"] = f.query_id;
      j["message"] = f.message;
      lines += j.dump() + '\n';
      std::cerr << "mhrag: query '" << f.query_id << "' skipped: " << f.message << '\n';
    }
    write_text_file(failures_jsonl, lines);
  }

  struct Means {
    std::size_t n = 0;
    double xi = 0.0;
    double xi_c = 0.0;
    double xi_w = 0.0;
  };
  std::map<std::string, Means> by_tag;
  for (const auto& r : table.rows) {
    auto& m = by_tag[r.strategy_tag];
    ++m.n;
    m.xi += r.xi;
    m.xi_c += r.xi_c;
    m.xi_w += r.xi_w;
  }
  out << "strategy\trows\tmean_xi\tmean_xi_c\tmean_xi_w\n";
  for (const auto& s : config.strategies) {
    const auto it = by_tag.find(s.tag());
    if (it == by_tag.end()) continue;
    const auto& m = it->second;
    const double n = static_cast<double>(m.n);
    out << it->first << '\t' << m.n << '\t' << fixed4(m.xi / n) << '\t' << fixed4(m.xi_c / n)
        << '\t' << fixed4(m.xi_w / n) << '\n';
  }
}

void cmd_report(const ReportOptions& options, std::ostream& out) {
  const fs::path dir = options.output_dir.value_or(options.results.parent_path() / "report");
  const fs::path aggregate_csv = dir / "aggregate.csv";
  const fs::path relative_csv = dir / "relative.csv";
  refuse_overwrite({aggregate_csv, relative_csv}, options.force);

  std::ifstream in(options.results);
  if (!in) throw DataError("cannot open '" + options.results.string() + "'");
  std::vector<EvalResult> rows;
  try {
    rows = read_results_csv(in);
  } catch (const DataError& e) {
    throw DataError(options.results.string() + ": " + e.what());
  }
  if (rows.empty()) throw DataError("'" + options.results.string() + "' has no result rows");

  const auto aggregates = aggregate(rows);
  const auto relative = relative_improvements(aggregates, options.baseline);
  if (relative.empty()) {
    std::cerr << "mhrag: no relative improvements against '" << options.baseline << "'\n";
  }

  std::ostringstream agg;
  write_aggregate_csv(agg, aggregates);
  write_text_file(aggregate_csv, agg.str());
  std::ostringstream rel;
  write_relative_csv(rel, relative);
  write_text_file(relative_csv, rel.str());
  out << aggregate_csv.string() << '\n' << relative_csv.string() << '\n';
  if (options.plots) {
    for (const auto& p : write_plots(dir, aggregates, relative)) out << p.string() << '\n';
  }
}

void cmd_gen_planted(const GenPlantedOptions& options, std::ostream& out) {
  const fs::path dir = options.output_dir;
  refuse_overwrite({dir / "corpus" / "records.jsonl", dir / "corpus" / "manifest.json",
                    dir / "queries.jsonl", dir / "query_embeddings.jsonl", dir / "evaluate.toml"},
                   options.force);
  if (!(options.sigma_fraction >= 0.0)) throw UsageError("sigma fraction must be non-negative");

  PlantedCorpusSpec spec;
  spec.h = options.h;
  spec.d_head = options.d_head;
  spec.num_categories = options.categories;
  spec.docs_per_category = options.docs_per_category;
  spec.identity_scale = options.identity_scale;
  spec.salience_gain = options.salience_gain;
  spec.mixing_seed = options.mixing_seed;
  const double separation = PlantedGenerator(spec, options.seed).separation();
  spec.cluster_spread = options.sigma.value_or(options.sigma_fraction * separation);
  const PlantedGenerator generator(spec, options.seed);

  const auto corpus = generator.generate();
  const auto queries = planted_queries(generator, options.aspect_counts, options.queries_per_count,
                                       options.query_noise, options.seed + 1);

  write_manifest(dir / "corpus" / "manifest.json", corpus.manifest);
  write_records(dir / "corpus" / "records.jsonl", corpus.records);
  write_eval_queries(dir / "queries.jsonl", queries.queries);
  write_query_embeddings(dir / "query_embeddings.jsonl", queries.embeddings);

  std::ostringstream toml;
  toml << "# mhrag ingest --corpus corpus/records.jsonl --store store\n"
       << "# mhrag evaluate --config evaluate.toml\n\n"
       << "[paths]\n"
       << "store = \"store\"\n"
       << "queries = \"queries.jsonl\"\n"
       << "query_embeddings = \"query_embeddings.jsonl\"\n"
       << "results = \"results\"\n\n"
       << "[evaluation]\n"
       << "k_values = [10, 15, 20, 25, 30]\n"
       << "w = 2.0\n";
  for (const char* kind : {"standard", "mrag", "split", "mrag1", "mrag2", "split1", "split2"}) {
    toml << "\n[[strategy]]\nkind = \"" << kind << "\"\n";
  }
  write_text_file(dir / "evaluate.toml", toml.str());

  out << corpus.records.size() << " chunks, h=" << spec.h << ", d_head=" << spec.d_head
      << ", separation=" << format_double(separation)
      << ", sigma=" << format_double(spec.cluster_spread) << ", " << queries.queries.size()
      << " queries\n";
}

void cmd_gen_queries(const GenQueriesOptions& options, std::ostream& out) {
  fs::path flagged_path = options.flagged.value_or([&] {
    fs::path p = options.output;
    p.replace_filename(options.output.stem().string() + ".flagged.jsonl");
    return p;
  }());
  refuse_overwrite({options.output, flagged_path}, options.force);
  if (options.parallelism == 0) throw UsageError("parallelism must be positive");

  const auto categories = read_documents(options.documents, options.min_chars);
  const auto plans = sample_query_plans(categories, options.aspect_counts,
                                        options.queries_per_count, options.seed);
  HttpChatClient client(options.llm);
  StoryOptions story;
  story.max_attempts = options.max_attempts;
  story.min_length = options.min_length;
  const auto batch =
      generate_story_queries(plans, categories, client, story, options.parallelism);

  write_eval_queries(options.output, batch.queries);
  std::string flagged;
  std::size_t next = 0;
  for (const auto& outcome : batch.outcomes) {
    if (!outcome.flagged) continue;
    auto j = nlohmann::ordered_json::parse(eval_query_to_json(batch.flagged.at(next++)));
    j["attempts"] = outcome.attempts;
    j["missing_titles"] = outcome.missing_titles;
    flagged += j.dump() + '\n';
  }
  write_text_file(flagged_path, flagged);
  out << batch.queries.size() << " queries, " << batch.flagged.size() << " flagged\n";
}

}  // namespace mhrag::cli
