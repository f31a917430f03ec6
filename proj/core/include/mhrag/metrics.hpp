#pragma once

#include <span>
#include <string>
#include <vector>

#include "mhrag/store.hpp"

namespace mhrag {

/// A document the query is expected to retrieve, with its category.
struct GroundTruthDoc {
  std::string id;
  std::string category;

  bool operator==(const GroundTruthDoc&) const = default;
};

inline constexpr double kDefaultMetricWeight = 2.0;

/// Xi: |retrieved ∩ ground truth| / |ground truth|. Duplicate retrieved ids
/// count once.
double success_ratio(std::span<const std::string> retrieved,
                     std::span<const GroundTruthDoc> ground_truth);

/// Xi_c: number of distinct ground-truth categories with at least one
/// retrieved document, divided by |ground truth|. Retrieved ids are resolved
/// to categories through `corpus`.
double category_success_ratio(std::span<const std::string> retrieved,
                              std::span<const GroundTruthDoc> ground_truth,
                              const MultiSpaceStore& corpus);

/// Same, with the retrieved documents' categories already resolved.
double category_success_ratio(std::span<const std::string> retrieved_categories,
                              std::span<const GroundTruthDoc> ground_truth);

/// Xi_w = (w * xi + xi_c) / (w + 1); w must be positive.
double weighted_success_ratio(double xi, double xi_c, double w = kDefaultMetricWeight);

}  // namespace mhrag
