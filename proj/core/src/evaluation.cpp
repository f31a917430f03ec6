#include "mhrag/evaluation.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "mhrag/error.hpp"
#include "mhrag/interchange.hpp"
#include "mhrag/parallel.hpp"

namespace mhrag {

void EvalQuery::validate() const {
  if (id.empty()) throw DataError("query with empty id");
  if (aspects == 0) throw DataError("query '" + id + "': aspects must be positive");
  if (ground_truth.size() != aspects) {
    throw DataError("query '" + id + "': " + std::to_string(aspects) + " aspects but " +
                    std::to_string(ground_truth.size()) + " ground-truth documents");
  }
  std::unordered_set<std::string> ids, categories;
  for (const auto& doc : ground_truth) {
    if (!ids.insert(doc.id).second) {
      throw DataError("query '" + id + "': duplicate ground-truth id '" + doc.id + "'");
    }
    if (!categories.insert(doc.category).second) {
      throw DataError("query '" + id + "': duplicate ground-truth category '" + doc.category +
                      "'");
    }
  }
}

std::vector<EvalQuery> read_eval_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<EvalQuery> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ": line " + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      EvalQuery q;
      q.id = j.at("id").get<std::string>();
      q.text = j.value("text", std::string());
      q.aspects = j.at("aspects").get<std::size_t>();
      for (const auto& g : j.at("ground_truth")) {
        q.ground_truth.push_back({g.at("id").get<std::string>(), g.at("category").get<std::string>()});
      }
      q.validate();
      if (!seen.insert(q.id).second) throw DataError("duplicate query id '" + q.id + "'");
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

std::string eval_query_to_json(const EvalQuery& q) {
  nlohmann::ordered_json j;
  j["id"] = q.id;
  j["text"] = q.text;
  j["aspects"] = q.aspects;
  auto gt = nlohmann::ordered_json::array();
  for (const auto& g : q.ground_truth) {
    nlohmann::ordered_json doc;
    doc["id"] = g.id;
    doc["category"] = g.category;
    gt.push_back(std::move(doc));
  }
  j["ground_truth"] = std::move(gt);
  return j.dump();
}

void write_eval_queries(const std::filesystem::path& path, std::span<const EvalQuery> queries) {
  std::string out;
  for (const auto& q : queries) out += eval_query_to_json(q) + "\n";
  write_text_file(path, out);
}

EvalResult evaluate_retrieval(const EvalQuery& query, const RankedRetrieval& retrieval,
                              const MultiSpaceStore& corpus, double w) {
  const auto ids = retrieval.ids();
  std::vector<std::string> categories;
  categories.reserve(ids.size());
  for (const auto& id : ids) categories.push_back(corpus.category_of(id));

  EvalResult r;
  r.query_id = query.id;
  r.strategy_tag = retrieval.strategy_tag;
  r.aspects = query.aspects;
  r.k = retrieval.k;
  r.xi = success_ratio(ids, query.ground_truth);
  r.xi_c = category_success_ratio(categories, query.ground_truth);
  r.xi_w = weighted_success_ratio(r.xi, r.xi_c, w);

  const std::unordered_set<std::string> got_ids(ids.begin(), ids.end());
  const std::unordered_set<std::string> got_categories(categories.begin(), categories.end());
  for (const auto& doc : query.ground_truth) {
    if (got_ids.contains(doc.id)) r.matched_ids.push_back(doc.id);
    if (got_categories.contains(doc.category)) r.matched_categories.push_back(doc.category);
  }
  return r;
}

namespace {

StrategyConfig with_k(const StrategyConfig& config, std::size_t k) {
  StrategyConfig out = config;
  out.k = k;
  if (out.base) {
    auto base = std::make_shared<StrategyConfig>(*out.base);
    base->k = k;
    out.base = std::move(base);
  }
  return out;
}

}  // namespace

EvalTable run_evaluation(const RetrievalContext& ctx, std::span<const EvalQuery> queries,
                         std::span<const StrategyConfig> strategies,
                         std::span<const std::size_t> k_values, EmbeddingProvider& embedder,
                         const EvalOptions& options) {
  if (ctx.store == nullptr) throw UsageError("evaluation needs a store");
  if (strategies.empty()) throw UsageError("no strategies to evaluate");
  if (k_values.empty()) throw UsageError("no k values to evaluate");
  for (std::size_t k : k_values) {
    if (k == 0) throw UsageError("k values must be positive");
  }
  weighted_success_ratio(0.0, 0.0, options.w);  // validates w
  for (const auto& s : strategies) with_k(s, k_values.front()).validate();

  EvalTable table;
  if (queries.empty()) return table;

  // Embed everything in one batch; fall back to one call per query so a
  // single bad query does not sink the run.
  std::vector<std::optional<QueryEmbedding>> embedded(queries.size());
  std::vector<std::string> texts;
  texts.reserve(queries.size());
  for (const auto& q : queries) texts.push_back(q.text);
  try {
    auto batch = embedder.embed_batch(texts);
    for (std::size_t i = 0; i < queries.size(); ++i) embedded[i] = std::move(batch.at(i));
  } catch (const std::exception&) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      try {
        embedded[i] = embedder.embed(queries[i].text);
      } catch (const std::exception& e) {
        table.failures.push_back({queries[i].id, e.what()});
      }
    }
  }
  if (table.failures.size() == queries.size()) {
    throw ExternalServiceError("embedding failed for every query (first: " +
                               table.failures.front().message + ")");
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (embedded[i]) embedded[i]->text = queries[i].text;
  }

  struct Cell {
    std::size_t query;
    std::size_t strategy;
    std::size_t k;
  };
  std::vector<Cell> cells;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (!embedded[q]) continue;
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      for (std::size_t k : k_values) cells.push_back({q, s, k});
    }
  }

  // Question generators and embedders are not required to be thread-safe.
  const bool has_fusion = std::any_of(strategies.begin(), strategies.end(), [](const auto& s) {
    return s.kind == StrategyKind::fusion;
  });
  std::vector<EvalResult> results(cells.size());
  parallel_for(cells.size(), has_fusion ? 1 : options.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const auto config = with_k(strategies[cell.strategy], cell.k);
    const auto ranked = retrieve(ctx, config, *embedded[cell.query]);
    results[i] = evaluate_retrieval(queries[cell.query], ranked, *ctx.store, options.w);
  });

  std::sort(results.begin(), results.end(), [](const EvalResult& a, const EvalResult& b) {
    return std::tie(a.query_id, a.strategy_tag, a.k) < std::tie(b.query_id, b.strategy_tag, b.k);
  });
  table.rows = std::move(results);
  return table;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  // Identical inputs must summarize to exactly that value.
  if (values.front() == values.back()) s.mean = values.front();
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size() || frac == 0.0) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  s.min = values.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = values.back();
  return s;
}

std::vector<AggregateRow> aggregate(std::span<const EvalResult> rows) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, std::array<std::vector<double>, 3>> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.strategy_tag, r.aspects, r.k}];
    g[0].push_back(r.xi);
    g[1].push_back(r.xi_c);
    g[2].push_back(r.xi_w);
  }
  static constexpr std::array<const char*, 3> kMetrics{"xi", "xi_c", "xi_w"};
  std::vector<AggregateRow> out;
  for (auto& [key, metrics] : groups) {
    for (std::size_t m = 0; m < 3; ++m) {
      out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), kMetrics[m],
                     summarize(std::move(metrics[m]))});
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("results line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return value;
}

constexpr const char* kResultsHeader = "query_id,strategy,aspects,k,xi,xi_c,xi_w";

}  // namespace

void write_results_csv(std::ostream& out, std::span<const EvalResult> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.query_id) << ',' << csv_field(r.strategy_tag) << ',' << r.aspects << ','
        << r.k << ',' << format_double(r.xi) << ',' << format_double(r.xi_c) << ','
        << format_double(r.xi_w) << '\n';
  }
}

std::vector<EvalResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("results CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw DataError("results CSV has an unexpected header");
  std::vector<EvalResult> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) {
      throw DataError("results line " + std::to_string(line_no) + ": expected 7 fields");
    }
    EvalResult r;
    r.query_id = f[0];
    r.strategy_tag = f[1];
    r.aspects = parse_number<std::size_t>(f[2], line_no);
    r.k = parse_number<std::size_t>(f[3], line_no);
    r.xi = parse_number<double>(f[4], line_no);
    r.xi_c = parse_number<double>(f[5], line_no);
    r.xi_w = parse_number<double>(f[6], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "strategy,aspects,k,metric,count,mean,min,q1,median,q3,max\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out << csv_field(r.strategy_tag) << ',' << r.aspects << ',' << r.k << ',' << r.metric << ','
        << s.count << ',' << format_double(s.mean) << ',' << format_double(s.min) << ','
        << format_double(s.q1) << ',' << format_double(s.median) << ','
        << format_double(s.q3) << ',' << format_double(s.max) << '\n';
  }
}

}  // namespace mhrag
