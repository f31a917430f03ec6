#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mhrag/evaluation.hpp"

namespace mhrag {

/// Mean Xi_w of a strategy relative to a baseline strategy at the same
/// (aspects, k) point: mean / baseline_mean - 1.
struct RelativeImprovement {
  std::string strategy_tag;
  std::size_t aspects = 0;
  std::size_t k = 0;
  double mean = 0.0;
  double baseline_mean = 0.0;
  double relative = 0.0;
};

/// Points where the baseline mean is zero are skipped.
std::vector<RelativeImprovement> relative_improvements(std::span<const AggregateRow> aggregates,
                                                       const std::string& baseline = "standard");

// strategy,aspects,k,mean_xi_w,baseline_mean_xi_w,relative
void write_relative_csv(std::ostream& out, std::span<const RelativeImprovement> rows);

/// SVG renderings of the aggregate tables:
///   improvement_aspects_<n>.svg  relative Xi_w improvement over k, one line per strategy
///   boxplot_xi_w_k<k>.svg        Xi_w five-number summaries per strategy and aspect count
/// Returns the files written.
std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir,
                                               std::span<const AggregateRow> aggregates,
                                               std::span<const RelativeImprovement> relative);

}  // namespace mhrag
