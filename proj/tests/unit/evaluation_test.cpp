#include <gtest/gtest.h>

#include <sstream>

#include "mhrag/error.hpp"
#include "mhrag/evaluation.hpp"
#include "mhrag/interchange.hpp"
#include "mhrag/scoring.hpp"
#include "test_support.hpp"

using namespace mhrag;
using namespace mhrag::testing;

namespace {

// Chunk ids d000.. with category "c<i % cats>"; queries are random and
// their ground truth is the `aspects` nearest standard neighbors.
struct Fixture {
  std::optional<MultiSpaceStore> store;
  HeadScores scores;
  std::vector<EvalQuery> queries;
  std::vector<QueryEmbedding> embeddings;

  Fixture(std::uint64_t seed, std::size_t n_queries, std::size_t aspects) {
    Rng rng(seed);
    const std::size_t n = 40;
    StoreBuilder b(manifest_for(2, 3));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Vector> heads{random_vector(rng, 3), random_vector(rng, 3)};
      MultiAspectEmbedding e(heads);
      b.add(make_record(chunk_id(i), heads, e.concatenated(), "c" + std::to_string(i)));
    }
    store.emplace(std::move(b).seal());
    scores = compute_scores(*store);
    for (std::size_t q = 0; q < n_queries; ++q) {
      QueryEmbedding emb;
      emb.id = "q" + std::to_string(q);
      emb.text = "query " + std::to_string(q);
      emb.heads = random_query(rng, 2, 3);
      emb.standard = emb.heads.concatenated();
      EvalQuery eq;
      eq.id = emb.id;
      eq.text = emb.text;
      eq.aspects = aspects;
      for (const auto& nb : store->nearest_standard(*emb.standard, aspects)) {
        eq.ground_truth.push_back({nb.id, store->category_of(nb.id)});
      }
      queries.push_back(eq);
      embeddings.push_back(emb);
    }
  }

  RetrievalContext context() const {
    RetrievalContext ctx;
    ctx.store = &*store;
    ctx.scores = &scores;
    return ctx;
  }
};

std::vector<StrategyConfig> strategies(std::initializer_list<StrategyKind> kinds) {
  std::vector<StrategyConfig> out;
  for (auto k : kinds) {
    StrategyConfig c;
    c.kind = k;
    out.push_back(c);
  }
  return out;
}

std::string results_csv(const EvalTable& t) {
  std::ostringstream os;
  write_results_csv(os, t.rows);
  return os.str();
}

class FlakyEmbedder : public EmbeddingProvider {
 public:
  FlakyEmbedder(std::vector<QueryEmbedding> entries, std::string bad)
      : inner_(std::move(entries)), bad_(std::move(bad)) {}
  QueryEmbedding embed(std::string_view text) override {
    if (text == bad_) throw ExternalServiceError("cannot embed");
    return inner_.embed(text);
  }

 private:
  FileEmbeddingProvider inner_;
  std::string bad_;
};

}  // namespace

TEST(RunEvaluation, OneRowPerCell) {
  Fixture f(1, 25, 3);
  FileEmbeddingProvider embedder(f.embeddings);
  const std::vector<std::size_t> ks{5, 10, 15};
  const auto table = run_evaluation(f.context(), f.queries,
                                    strategies({StrategyKind::standard, StrategyKind::mrag}), ks,
                                    embedder);
  EXPECT_EQ(table.rows.size(), 150u);
  EXPECT_TRUE(table.failures.empty());
  for (const auto& r : table.rows) {
    EXPECT_GE(r.xi, 0.0);
    EXPECT_LE(r.xi, 1.0);
    EXPECT_GE(r.xi_c, 0.0);
    EXPECT_LE(r.xi_c, 1.0);
    EXPECT_GE(r.xi_w, std::min(r.xi, r.xi_c));
    EXPECT_LE(r.xi_w, std::max(r.xi, r.xi_c));
  }
  EXPECT_TRUE(std::is_sorted(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.query_id, a.strategy_tag, a.k) < std::tie(b.query_id, b.strategy_tag, b.k);
  }));
}

TEST(RunEvaluation, StandardFindsNearestGroundTruth) {
  Fixture f(2, 10, 4);
  FileEmbeddingProvider embedder(f.embeddings);
  const std::vector<std::size_t> ks{4, 8};
  const auto table =
      run_evaluation(f.context(), f.queries, strategies({StrategyKind::standard}), ks, embedder);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.xi, 1.0);
    EXPECT_EQ(r.xi_c, 1.0);
    EXPECT_EQ(r.xi_w, 1.0);
    EXPECT_EQ(r.matched_ids.size(), 4u);
  }
}

TEST(RunEvaluation, DeterministicAndIndependentOfJobs) {
  Fixture f(3, 12, 2);
  FileEmbeddingProvider embedder(f.embeddings);
  const std::vector<std::size_t> ks{1, 3, 7};
  const auto strats = strategies({StrategyKind::standard, StrategyKind::mrag, StrategyKind::mrag1,
                                  StrategyKind::mrag2});
  const auto a = run_evaluation(f.context(), f.queries, strats, ks, embedder, {2.0, 1});
  const auto b = run_evaluation(f.context(), f.queries, strats, ks, embedder, {2.0, 1});
  const auto c = run_evaluation(f.context(), f.queries, strats, ks, embedder, {2.0, 4});
  EXPECT_EQ(results_csv(a), results_csv(b));
  EXPECT_EQ(results_csv(a), results_csv(c));
  EXPECT_EQ(a.rows, c.rows);
}

TEST(RunEvaluation, FailedEmbeddingsAreRecordedAndSkipped) {
  Fixture f(4, 5, 2);
  FlakyEmbedder embedder(f.embeddings, f.queries[2].text);
  const std::vector<std::size_t> ks{3};
  const auto table =
      run_evaluation(f.context(), f.queries, strategies({StrategyKind::mrag}), ks, embedder);
  EXPECT_EQ(table.rows.size(), 4u);
  ASSERT_EQ(table.failures.size(), 1u);
  EXPECT_EQ(table.failures[0].query_id, "q2");

  FileEmbeddingProvider empty(std::vector<QueryEmbedding>{});
  EXPECT_THROW(
      run_evaluation(f.context(), f.queries, strategies({StrategyKind::mrag}), ks, empty),
      ExternalServiceError);
}

TEST(RunEvaluation, RejectsBadConfiguration) {
  Fixture f(5, 2, 1);
  FileEmbeddingProvider embedder(f.embeddings);
  const std::vector<std::size_t> ks{3};
  const std::vector<std::size_t> zero{0};
  EXPECT_THROW(run_evaluation(f.context(), f.queries, {}, ks, embedder), UsageError);
  EXPECT_THROW(run_evaluation(f.context(), f.queries, strategies({StrategyKind::mrag}), zero,
                              embedder),
               UsageError);
  EXPECT_THROW(run_evaluation(f.context(), f.queries, strategies({StrategyKind::mrag}), ks,
                              embedder, {0.0, 1}),
               UsageError);
}

TEST(Summarize, QuartilesInterpolate) {
  const auto s = summarize({4, 1, 3, 2, 5});
  EXPECT_EQ(s.count, 5u);
  EXPECT_EQ(s.mean, 3.0);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.q1, 2.0);
  EXPECT_EQ(s.median, 3.0);
  EXPECT_EQ(s.q3, 4.0);
  EXPECT_EQ(s.max, 5.0);
  const auto t = summarize({0, 1});
  EXPECT_EQ(t.q1, 0.25);
  EXPECT_EQ(t.median, 0.5);
  EXPECT_EQ(t.q3, 0.75);
  EXPECT_EQ(summarize({}).count, 0u);
}

TEST(Aggregate, IdenticalRowsSummarizeToTheirValue) {
  std::vector<EvalResult> rows;
  for (int i = 0; i < 7; ++i) {
    rows.push_back({"q" + std::to_string(i), "mrag", 5, 10, 0.1, 0.7, weighted_success_ratio(0.1, 0.7), {}, {}});
  }
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(agg[0].metric, "xi");
  EXPECT_EQ(agg[0].summary.mean, 0.1);
  EXPECT_EQ(agg[1].summary.mean, 0.7);
  EXPECT_EQ(agg[2].summary.mean, rows[0].xi_w);
  for (const auto& a : agg) {
    EXPECT_EQ(a.summary.count, 7u);
    EXPECT_EQ(a.summary.min, a.summary.max);
    EXPECT_EQ(a.summary.median, a.summary.mean);
  }
}

TEST(ResultsCsv, RoundTrip) {
  std::vector<EvalResult> rows{{"q,1", "fusion-mrag", 5, 10, 0.2, 0.4, 0.1 + 0.2, {}, {}},
                               {"q\"2", "standard", 1, 30, 1, 1, 1, {}, {}}};
  std::ostringstream os;
  write_results_csv(os, rows);
  std::istringstream in(os.str());
  EXPECT_EQ(read_results_csv(in), rows);
  std::istringstream bad("query_id,strategy,aspects,k,xi,xi_c,xi_w\nq,mrag,x,1,0,0,0\n");
  EXPECT_THROW(read_results_csv(bad), DataError);
  std::istringstream header("id,xi\n");
  EXPECT_THROW(read_results_csv(header), DataError);
}

TEST(EvalQueries, RoundTripAndValidation) {
  TempDir dir;
  std::vector<EvalQuery> qs{{"q1", "text", 2, {{"a", "x"}, {"b", "y"}}}};
  write_eval_queries(dir / "q.jsonl", qs);
  EXPECT_EQ(read_eval_queries(dir / "q.jsonl"), qs);

  write_text_file(dir / "dup.jsonl",
                  R"({"id":"q","aspects":1,"ground_truth":[{"id":"a","category":"x"}]})"
                  "\n"
                  R"({"id":"q","aspects":1,"ground_truth":[{"id":"b","category":"y"}]})"
                  "\n");
  EXPECT_THROW(read_eval_queries(dir / "dup.jsonl"), DataError);
  EvalQuery q{"q", "", 2, {{"a", "x"}, {"b", "x"}}};
  EXPECT_THROW(q.validate(), DataError);
  q.ground_truth[1] = {"a", "y"};
  EXPECT_THROW(q.validate(), DataError);
  q.ground_truth.pop_back();
  EXPECT_THROW(q.validate(), DataError);
}
