#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mhrag/metrics.hpp"
#include "mhrag/providers.hpp"
#include "mhrag/strategies.hpp"

namespace mhrag {

/// A multi-aspect query: one ground-truth document from each of `aspects`
/// distinct categories.
struct EvalQuery {
  std::string id;
  std::string text;
  std::size_t aspects = 0;
  std::vector<GroundTruthDoc> ground_truth;

  /// |ground_truth| == aspects, ids and categories pairwise distinct.
  void validate() const;
  bool operator==(const EvalQuery&) const = default;
};

// {"id", "text", "aspects", "ground_truth": [{"id", "category"}]} per line.
std::vector<EvalQuery> read_eval_queries(const std::filesystem::path& path);
std::string eval_query_to_json(const EvalQuery& query);
void write_eval_queries(const std::filesystem::path& path, std::span<const EvalQuery> queries);

struct EvalResult {
  std::string query_id;
  std::string strategy_tag;
  std::size_t aspects = 0;
  std::size_t k = 0;
  double xi = 0.0;
  double xi_c = 0.0;
  double xi_w = 0.0;
  std::vector<std::string> matched_ids;
  std::vector<std::string> matched_categories;

  bool operator==(const EvalResult&) const = default;
};

struct EvalFailure {
  std::string query_id;
  std::string message;
};

struct EvalOptions {
  double w = kDefaultMetricWeight;
  std::size_t jobs = 1;
};

struct EvalTable {
  std::vector<EvalResult> rows;  // sorted by (query id, strategy tag, k)
  std::vector<EvalFailure> failures;
};

/// Scores one retrieval against a query's ground truth.
EvalResult evaluate_retrieval(const EvalQuery& query, const RankedRetrieval& retrieval,
                              const MultiSpaceStore& corpus, double w = kDefaultMetricWeight);

/// Runs every (query, strategy, k) cell. Each strategy is run with its k
/// replaced by the swept value (its c, when set, is kept). Queries whose
/// embedding fails are recorded in `failures` and skipped; the run throws
/// ExternalServiceError only when every query fails.
EvalTable run_evaluation(const RetrievalContext& ctx, std::span<const EvalQuery> queries,
                         std::span<const StrategyConfig> strategies,
                         std::span<const std::size_t> k_values, EmbeddingProvider& embedder,
                         const EvalOptions& options = {});

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  bool operator==(const Summary&) const = default;
};

/// Mean and five-number summary; quartiles use linear interpolation between
/// order statistics.
Summary summarize(std::vector<double> values);

struct AggregateRow {
  std::string strategy_tag;
  std::size_t aspects = 0;
  std::size_t k = 0;
  std::string metric;  // "xi", "xi_c" or "xi_w"
  Summary summary;

  bool operator==(const AggregateRow&) const = default;
};

/// One row per (strategy, aspects, k, metric), in that sort order.
std::vector<AggregateRow> aggregate(std::span<const EvalResult> rows);

// Results CSV: query_id,strategy,aspects,k,xi,xi_c,xi_w
void write_results_csv(std::ostream& out, std::span<const EvalResult> rows);
std::vector<EvalResult> read_results_csv(std::istream& in);
// Aggregate CSV: strategy,aspects,k,metric,count,mean,min,q1,median,q3,max
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

}  // namespace mhrag
