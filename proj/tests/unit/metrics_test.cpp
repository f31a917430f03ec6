#include <gtest/gtest.h>

#include <algorithm>

#include "mhrag/error.hpp"
#include "mhrag/metrics.hpp"
#include "mhrag/random.hpp"

using namespace mhrag;

namespace {

std::vector<GroundTruthDoc> ground_truth(std::size_t n) {
  std::vector<GroundTruthDoc> gt;
  for (std::size_t i = 0; i < n; ++i) {
    gt.push_back({"g" + std::to_string(i), "cat" + std::to_string(i)});
  }
  return gt;
}

}  // namespace

TEST(SuccessRatio, FourOfTenAmongThirty) {
  const auto gt = ground_truth(10);
  std::vector<std::string> retrieved;
  for (int i = 0; i < 4; ++i) retrieved.push_back("g" + std::to_string(i));
  for (int i = 0; i < 26; ++i) retrieved.push_back("other" + std::to_string(i));
  EXPECT_EQ(success_ratio(retrieved, gt), 0.4);
}

TEST(SuccessRatio, SupersetAndDisjoint) {
  const auto gt = ground_truth(3);
  EXPECT_EQ(success_ratio(std::vector<std::string>{"x", "g2", "g0", "g1"}, gt), 1.0);
  EXPECT_EQ(success_ratio(std::vector<std::string>{"x", "y"}, gt), 0.0);
  EXPECT_EQ(success_ratio(std::vector<std::string>{}, gt), 0.0);
  EXPECT_THROW(success_ratio(std::vector<std::string>{"x"}, {}), UsageError);
}

TEST(SuccessRatio, DuplicatesCountOnce) {
  const auto gt = ground_truth(2);
  EXPECT_EQ(success_ratio(std::vector<std::string>{"g0", "g0", "g0"}, gt), 0.5);
}

TEST(SuccessRatio, PermutationInvariant) {
  Rng rng(1);
  const auto gt = ground_truth(6);
  std::vector<std::string> retrieved{"g0", "a", "g3", "b", "g5", "c", "d"};
  const double ref = success_ratio(retrieved, gt);
  for (int t = 0; t < 50; ++t) {
    for (std::size_t i = retrieved.size() - 1; i > 0; --i) {
      std::swap(retrieved[i], retrieved[rng.below(i + 1)]);
    }
    EXPECT_EQ(success_ratio(retrieved, gt), ref);
  }
}

TEST(CategorySuccessRatio, ThreeSwordDocsNoStarDocs) {
  const std::vector<GroundTruthDoc> gt{{"s1", "swords"}, {"t1", "stars"}};
  EXPECT_EQ(category_success_ratio(std::vector<std::string>{"swords", "swords", "swords"}, gt), 0.5);
}

TEST(CategorySuccessRatio, ExactAndUnrelated) {
  const auto gt = ground_truth(4);
  EXPECT_EQ(category_success_ratio(std::vector<std::string>{"cat0", "cat1", "cat2", "cat3"}, gt),
            1.0);
  EXPECT_EQ(category_success_ratio(std::vector<std::string>{"x", "y"}, gt), 0.0);
}

TEST(CategorySuccessRatio, IrrelevantDocumentsChangeNothing) {
  const auto gt = ground_truth(5);
  std::vector<std::string> ids{"g1", "g3"};
  std::vector<std::string> cats{"cat1", "cat3"};
  const double xi = success_ratio(ids, gt);
  const double xi_c = category_success_ratio(cats, gt);
  for (int i = 0; i < 10; ++i) {
    ids.push_back("noise" + std::to_string(i));
    cats.push_back("other" + std::to_string(i));
    EXPECT_EQ(success_ratio(ids, gt), xi);
    EXPECT_EQ(category_success_ratio(cats, gt), xi_c);
  }
}

TEST(WeightedSuccessRatio, FormulaCases) {
  EXPECT_EQ(weighted_success_ratio(0.5, 1.0, 2.0), 2.0 / 3.0);
  EXPECT_EQ(weighted_success_ratio(0.0, 1.0, 2.0), 1.0 / 3.0);
  EXPECT_EQ(weighted_success_ratio(1.0, 0.0, 1.0), 0.5);
  EXPECT_EQ(weighted_success_ratio(0.2, 0.8), (2.0 * 0.2 + 0.8) / 3.0);
  EXPECT_THROW(weighted_success_ratio(0.5, 0.5, 0.0), UsageError);
  EXPECT_THROW(weighted_success_ratio(0.5, 0.5, -1.0), UsageError);
}

TEST(WeightedSuccessRatio, FixedPointForAnyWeight) {
  Rng rng(2);
  for (int t = 0; t < 2000; ++t) {
    const double x = rng.below(21) / 20.0;
    const double w = 0.01 + rng.uniform() * 10;
    EXPECT_EQ(weighted_success_ratio(x, x, w), x);
  }
  for (double x : {0.0, 0.2, 1.0 / 3.0, 0.7, 1.0}) {
    EXPECT_EQ(weighted_success_ratio(x, x, 2.0), x);
  }
}

TEST(WeightedSuccessRatio, LiesBetweenItsInputs) {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const double xi = rng.uniform();
    const double xi_c = rng.uniform();
    const double w = 0.1 + rng.uniform() * 5;
    const double v = weighted_success_ratio(xi, xi_c, w);
    EXPECT_GE(v, std::min(xi, xi_c));
    EXPECT_LE(v, std::max(xi, xi_c));
    EXPECT_NEAR(v, (w * xi + xi_c) / (w + 1), 1e-15);
  }
}
