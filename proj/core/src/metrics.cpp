#include "mhrag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>
#include <unordered_set>

#include "mhrag/error.hpp"

namespace mhrag {

namespace {

void require_ground_truth(std::span<const GroundTruthDoc> ground_truth) {
  if (ground_truth.empty()) throw UsageError("ground truth must not be empty");
}

}  // namespace

double success_ratio(std::span<const std::string> retrieved,
                     std::span<const GroundTruthDoc> ground_truth) {
  require_ground_truth(ground_truth);
  const std::unordered_set<std::string_view> got(retrieved.begin(), retrieved.end());
  std::size_t hits = 0;
  for (const auto& doc : ground_truth) hits += got.contains(doc.id) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ground_truth.size());
}

double category_success_ratio(std::span<const std::string> retrieved_categories,
                              std::span<const GroundTruthDoc> ground_truth) {
  require_ground_truth(ground_truth);
  const std::unordered_set<std::string_view> got(retrieved_categories.begin(),
                                                 retrieved_categories.end());
  std::unordered_set<std::string_view> credited;
  for (const auto& doc : ground_truth) {
    if (got.contains(doc.category)) credited.insert(doc.category);
  }
  return static_cast<double>(credited.size()) / static_cast<double>(ground_truth.size());
}

double category_success_ratio(std::span<const std::string> retrieved,
                              std::span<const GroundTruthDoc> ground_truth,
                              const MultiSpaceStore& corpus) {
  std::vector<std::string> categories;
  categories.reserve(retrieved.size());
  for (const auto& id : retrieved) categories.push_back(corpus.category_of(id));
  return category_success_ratio(categories, ground_truth);
}

double weighted_success_ratio(double xi, double xi_c, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw UsageError("metric weight w must be positive");
  // Rounding in the direct formula can move the result one ulp outside
  // [min(xi, xi_c), max(xi, xi_c)]; equal inputs must come back unchanged.
  if (xi == xi_c) return xi;
  return std::clamp((w * xi + xi_c) / (w + 1.0), std::min(xi, xi_c), std::max(xi, xi_c));
}

}  // namespace mhrag
