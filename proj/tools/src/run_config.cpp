#include "mhrag_cli/run_config.hpp"

#include <algorithm>
#include <initializer_list>
#include <memory>

#include <toml.hpp>

#include "mhrag/error.hpp"
#include "mhrag/interchange.hpp"

namespace mhrag::cli {

namespace fs = std::filesystem;

namespace {

std::string key_name(std::string_view section, std::string_view key) {
  return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

void check_keys(const toml::table& table, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : table) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
      throw UsageError("config: unknown key '" + key_name(section, key.str()) + "'");
    }
  }
}

const toml::table* get_table(const toml::table& root, std::string_view key) {
  const toml::node* node = root.get(key);
  if (node == nullptr) return nullptr;
  if (const auto* t = node->as_table()) return t;
  throw UsageError("config: '" + std::string(key) + "' must be a table");
}

std::optional<std::string> get_string(const toml::table& t, std::string_view section,
                                      std::string_view key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (const auto* s = node->as_string()) return s->get();
  throw UsageError("config: '" + key_name(section, key) + "' must be a string");
}

std::optional<std::int64_t> get_integer(const toml::table& t, std::string_view section,
                                        std::string_view key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (const auto* i = node->as_integer()) return i->get();
  throw UsageError("config: '" + key_name(section, key) + "' must be an integer");
}

std::optional<std::size_t> get_count(const toml::table& t, std::string_view section,
                                     std::string_view key) {
  auto v = get_integer(t, section, key);
  if (!v) return std::nullopt;
  if (*v < 0) throw UsageError("config: '" + key_name(section, key) + "' must not be negative");
  return static_cast<std::size_t>(*v);
}

std::optional<double> get_number(const toml::table& t, std::string_view section,
                                 std::string_view key) {
  const toml::node* node = t.get(key);
  if (node == nullptr) return std::nullopt;
  if (const auto* f = node->as_floating_point()) return f->get();
  if (const auto* i = node->as_integer()) return static_cast<double>(i->get());
  throw UsageError("config: '" + key_name(section, key) + "' must be a number");
}

std::optional<fs::path> get_path(const toml::table& t, std::string_view section,
                                 std::string_view key, const fs::path& base_dir) {
  auto s = get_string(t, section, key);
  if (!s) return std::nullopt;
  fs::path p(*s);
  return p.is_absolute() ? p : base_dir / p;
}

StrategyConfig strategy_from_node(const toml::node& node, std::string_view where);

StrategyConfig strategy_from_table(const toml::table& t, std::string_view where) {
  check_keys(t, where, {"kind", "c", "num_questions", "base"});
  auto kind = get_string(t, where, "kind");
  if (!kind) throw UsageError("config: '" + std::string(where) + "' needs a 'kind'");
  StrategyConfig cfg;
  cfg.kind = parse_strategy_kind(*kind);
  cfg.c = get_count(t, where, "c");
  if (auto n = get_count(t, where, "num_questions")) cfg.num_questions = *n;
  if (const toml::node* base = t.get("base")) {
    if (cfg.kind != StrategyKind::fusion) {
      throw UsageError("config: '" + std::string(where) + ".base' is only valid for fusion");
    }
    cfg.base = std::make_shared<const StrategyConfig>(
        strategy_from_node(*base, std::string(where) + ".base"));
  } else if (cfg.kind == StrategyKind::fusion) {
    throw UsageError("config: fusion strategy needs a 'base'");
  }
  return cfg;
}

StrategyConfig strategy_from_node(const toml::node& node, std::string_view where) {
  if (const auto* s = node.as_string()) return parse_strategy_spec(s->get());
  if (const auto* t = node.as_table()) return strategy_from_table(*t, where);
  throw UsageError("config: '" + std::string(where) + "' must be a string or a table");
}

}  // namespace

fs::path RunConfig::scores_path() const { return scores ? *scores : store_dir / "scores.json"; }

void RunConfig::validate() const {
  if (!(w > 0.0)) throw UsageError("w must be positive");
  if (strategies.empty()) throw UsageError("no strategies configured");
  if (k_values.empty()) throw UsageError("no k values configured");
  for (auto k : k_values) {
    if (k == 0) throw UsageError("k values must be positive");
  }
  if (jobs && *jobs == 0) throw UsageError("jobs must be positive");
  if (sample_size && *sample_size == 0) throw UsageError("sample size must be positive");
  for (const auto& s : strategies) s.validate();

  if (store_dir.empty()) throw UsageError("no store directory configured");
  if (!fs::exists(store_dir / "manifest.json")) {
    throw UsageError("store '" + store_dir.string() + "' does not exist");
  }
  if (!queries) throw UsageError("no queries file configured");
  if (!fs::exists(*queries)) throw UsageError("queries file '" + queries->string() + "' not found");
  if (!query_embeddings && !embed_command) {
    throw UsageError("either query embeddings or an embedding command is required");
  }
  if (query_embeddings && !fs::exists(*query_embeddings)) {
    throw UsageError("query embeddings '" + query_embeddings->string() + "' not found");
  }
  if (scores && !fs::exists(*scores)) {
    throw UsageError("scores file '" + scores->string() + "' not found");
  }
}

RunConfig parse_run_config(std::string_view toml_text, const fs::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw UsageError("config: line " + std::to_string(e.source().begin.line) + ": " +
                     std::string(e.description()));
  }
  check_keys(root, "", {"paths", "evaluation", "scoring", "embedding", "llm", "strategy"});

  RunConfig cfg;
  if (const auto* paths = get_table(root, "paths")) {
    check_keys(*paths, "paths",
               {"store", "corpus", "queries", "query_embeddings", "scores", "results"});
    if (auto p = get_path(*paths, "paths", "store", base_dir)) cfg.store_dir = *p;
    cfg.corpus = get_path(*paths, "paths", "corpus", base_dir);
    cfg.queries = get_path(*paths, "paths", "queries", base_dir);
    cfg.query_embeddings = get_path(*paths, "paths", "query_embeddings", base_dir);
    cfg.scores = get_path(*paths, "paths", "scores", base_dir);
    if (auto p = get_path(*paths, "paths", "results", base_dir)) {
      cfg.results_dir = *p;
    } else {
      cfg.results_dir = base_dir / cfg.results_dir;
    }
  } else {
    cfg.results_dir = base_dir / cfg.results_dir;
  }

  if (const auto* ev = get_table(root, "evaluation")) {
    check_keys(*ev, "evaluation", {"k_values", "w", "jobs"});
    if (const toml::node* node = ev->get("k_values")) {
      const auto* arr = node->as_array();
      if (arr == nullptr) throw UsageError("config: 'evaluation.k_values' must be an array");
      cfg.k_values.clear();
      for (const auto& item : *arr) {
        const auto* i = item.as_integer();
        if (i == nullptr || i->get() <= 0) {
          throw UsageError("config: 'evaluation.k_values' must hold positive integers");
        }
        cfg.k_values.push_back(static_cast<std::size_t>(i->get()));
      }
    }
    if (auto w = get_number(*ev, "evaluation", "w")) cfg.w = *w;
    cfg.jobs = get_count(*ev, "evaluation", "jobs");
  }

  if (const auto* sc = get_table(root, "scoring")) {
    check_keys(*sc, "scoring", {"sample_size", "seed"});
    cfg.sample_size = get_count(*sc, "scoring", "sample_size");
    if (auto seed = get_count(*sc, "scoring", "seed")) cfg.seed = *seed;
  }

  if (const auto* em = get_table(root, "embedding")) {
    check_keys(*em, "embedding", {"command"});
    cfg.embed_command = get_string(*em, "embedding", "command");
  }

  if (const auto* llm = get_table(root, "llm")) {
    check_keys(*llm, "llm", {"endpoint", "model", "api_key_env", "temperature", "timeout_seconds"});
    if (auto v = get_string(*llm, "llm", "endpoint")) cfg.llm.endpoint = *v;
    if (auto v = get_string(*llm, "llm", "model")) cfg.llm.model = *v;
    if (auto v = get_string(*llm, "llm", "api_key_env")) cfg.llm.api_key_env = *v;
    if (auto v = get_number(*llm, "llm", "temperature")) cfg.llm.temperature = *v;
    if (auto v = get_count(*llm, "llm", "timeout_seconds")) {
      cfg.llm.timeout_seconds = static_cast<int>(*v);
    }
  }

  if (const toml::node* node = root.get("strategy")) {
    const auto* arr = node->as_array();
    if (arr == nullptr) throw UsageError("config: 'strategy' must be an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto* t = (*arr)[i].as_table();
      if (t == nullptr) throw UsageError("config: 'strategy' must be an array of tables");
      cfg.strategies.push_back(strategy_from_table(*t, "strategy[" + std::to_string(i) + "]"));
    }
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw UsageError("cannot read config '" + path.string() + "'");
  }
  try {
    return parse_run_config(text, path.parent_path());
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

StrategyConfig parse_strategy_spec(std::string_view spec) {
  StrategyConfig cfg;
  const auto colon = spec.find(':');
  cfg.kind = parse_strategy_kind(spec.substr(0, colon));
  if (colon != std::string_view::npos) {
    if (cfg.kind != StrategyKind::fusion) {
      throw UsageError("only fusion takes a base strategy: '" + std::string(spec) + "'");
    }
    cfg.base = std::make_shared<const StrategyConfig>(parse_strategy_spec(spec.substr(colon + 1)));
  } else if (cfg.kind == StrategyKind::fusion) {
    throw UsageError("fusion needs a base strategy, e.g. 'fusion:mrag'");
  }
  return cfg;
}

std::vector<StrategyConfig> parse_strategy_list(std::string_view specs) {
  std::vector<StrategyConfig> out;
  std::size_t start = 0;
  while (start <= specs.size()) {
    auto end = specs.find(',', start);
    if (end == std::string_view::npos) end = specs.size();
    auto item = specs.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) throw UsageError("empty entry in strategy list '" + std::string(specs) + "'");
    out.push_back(parse_strategy_spec(item));
    start = end + 1;
  }
  return out;
}

}  // namespace mhrag::cli
