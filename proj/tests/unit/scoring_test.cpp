#include <gtest/gtest.h>

#include "mhrag/error.hpp"
#include "mhrag/scoring.hpp"
#include "test_support.hpp"

using namespace mhrag;
using namespace mhrag::testing;

TEST(RawHeadStats, TwoOrthogonalVectors) {
  const auto store = single_space_store({"a", "b"}, {{1, 0}, {0, 1}});
  const auto raw = raw_head_stats(store);
  ASSERT_EQ(raw.mean_norm.size(), 1u);
  EXPECT_EQ(raw.mean_norm[0], 1.0);
  EXPECT_EQ(raw.mean_distance[0], 0.5);
  const auto scores = scale_scores(raw);
  EXPECT_EQ(scores.s[0], 1.0);
}

TEST(RawHeadStats, IdenticalEmbeddingsHaveZeroSpread) {
  StoreBuilder b(manifest_for(2, 2));
  b.add(make_record("a", {{1, 1}, {1, 0}}));
  b.add(make_record("b", {{1, 1}, {0, 1}}));
  b.add(make_record("c", {{1, 1}, {1, 1}}));
  const auto store = std::move(b).seal();
  const auto s = compute_scores(store);
  EXPECT_EQ(s.b[0], 0.0);
  EXPECT_EQ(s.s[0], 0.0);
  EXPECT_GT(s.s[1], 0.0);
}

TEST(ScaleScores, DividesEachComponentByItsMaximum) {
  RawHeadStats raw{{2.0, 1.0}, {0.5, 0.5}};
  const auto s = scale_scores(raw);
  EXPECT_EQ(s.a, (Vector{1.0, 0.5}));
  EXPECT_EQ(s.b, (Vector{1.0, 1.0}));
  EXPECT_EQ(s.s, (Vector{1.0, 0.5}));
}

TEST(ScaleScores, AllZeroComponentStaysZero) {
  RawHeadStats raw{{2.0, 1.0}, {0.0, 0.0}};
  const auto s = scale_scores(raw);
  EXPECT_EQ(s.b, (Vector{0.0, 0.0}));
  EXPECT_EQ(s.s, (Vector{0.0, 0.0}));
  EXPECT_THROW(scale_scores(RawHeadStats{{1.0}, {1.0, 2.0}}), UsageError);
}

TEST(ScaleScores, ScoresAreNonNegativeAndZeroExactlyWhenAFactorIs) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    RawHeadStats raw;
    for (int i = 0; i < 4; ++i) {
      raw.mean_norm.push_back(rng.below(3) == 0 ? 0.0 : rng.uniform() * 5);
      raw.mean_distance.push_back(rng.below(3) == 0 ? 0.0 : rng.uniform() * 2);
    }
    const auto s = scale_scores(raw);
    for (int i = 0; i < 4; ++i) {
      EXPECT_GE(s.s[i], 0.0);
      EXPECT_EQ(s.s[i] == 0.0, s.a[i] == 0.0 || s.b[i] == 0.0);
    }
  }
}

TEST(ScaleScores, RankingMatchesUnscaledProduct) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    RawHeadStats raw;
    for (int i = 0; i < 5; ++i) {
      raw.mean_norm.push_back(0.1 + rng.uniform());
      raw.mean_distance.push_back(0.1 + rng.uniform());
    }
    const auto s = scale_scores(raw);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double pi = raw.mean_norm[i] * raw.mean_distance[i];
        const double pj = raw.mean_norm[j] * raw.mean_distance[j];
        if (pi < pj * (1 - 1e-12)) EXPECT_LT(s.s[i], s.s[j]);
      }
    }
  }
}

TEST(ComputeScores, SingleSpaceYieldsOneScore) {
  Rng rng(7);
  const auto store = random_store(rng, 10, 1, 4);
  const auto s = compute_scores(store);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.a[0], 1.0);
  EXPECT_EQ(s.b[0], 1.0);
  EXPECT_EQ(s.s[0], 1.0);
}

TEST(ComputeScores, SampleCoveringAllPairsEqualsExact) {
  Rng rng(8);
  const auto store = random_store(rng, 12, 3, 4);
  const auto exact = compute_scores(store);
  const auto sampled = compute_scores(store, 144, 9);
  EXPECT_EQ(sampled.s, exact.s);
  EXPECT_EQ(compute_scores(store, 1000, 9).s, exact.s);
}

TEST(ComputeScores, SamplingIsDeterministicPerSeed) {
  Rng rng(9);
  const auto store = random_store(rng, 40, 4, 6);
  const auto a = compute_scores(store, 100, 7);
  const auto b = compute_scores(store, 100, 7);
  const auto c = compute_scores(store, 100, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.b, c.b);
  EXPECT_EQ(a.sample_size, 100u);
  EXPECT_EQ(a.seed, 7u);
}

TEST(ComputeScores, SampledEstimateIsClose) {
  Rng rng(10);
  const auto store = random_store(rng, 60, 2, 8);
  const auto exact = raw_head_stats(store);
  const auto sampled = raw_head_stats(store, 2000, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(sampled.mean_distance[i], exact.mean_distance[i], 0.05);
    EXPECT_EQ(sampled.mean_norm[i], exact.mean_norm[i]);
  }
}

TEST(ComputeScores, ParallelMatchesSerial) {
  Rng rng(11);
  const auto store = random_store(rng, 30, 6, 5);
  EXPECT_EQ(compute_scores(store, std::nullopt, 0, 1), compute_scores(store, std::nullopt, 0, 4));
  EXPECT_EQ(compute_scores(store, 300, 2, 1), compute_scores(store, 300, 2, 3));
}

TEST(ComputeScores, RejectsEmptyStoreAndZeroSample) {
  const auto empty = ingest(manifest_for(2, 2), {});
  EXPECT_THROW(compute_scores(empty), DataError);
  const auto store = single_space_store({"a", "b"}, {{1, 0}, {0, 1}});
  EXPECT_THROW(compute_scores(store, 0), UsageError);
}

TEST(ScoresSidecar, RoundTrip) {
  TempDir dir;
  Rng rng(12);
  const auto store = random_store(rng, 20, 3, 4);
  for (auto sample : {std::optional<std::size_t>{}, std::optional<std::size_t>{50}}) {
    const auto s = compute_scores(store, sample, 4);
    write_scores(dir / "scores.json", s);
    EXPECT_EQ(read_scores(dir / "scores.json"), s);
  }
  EXPECT_THROW(parse_scores(R"({"a":[1],"b":[1,2],"s":[1],"seed":0})"), DataError);
  EXPECT_THROW(parse_scores(R"({"a":[1],"b":[1],"s":[-1],"seed":0})"), DataError);
  EXPECT_THROW(parse_scores("[]"), DataError);
}
