#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mhrag/store.hpp"

namespace mhrag {

/// Per-space statistics before scaling: mean L2 norm and mean cosine
/// distance over ordered pairs (self-pairs included).
struct RawHeadStats {
  Vector mean_norm;
  Vector mean_distance;
};

/// Importance score per embedding space, s_i = a_i * b_i, where a and b are
/// the raw statistics each divided by their maximum over all spaces.
struct HeadScores {
  Vector a;
  Vector b;
  Vector s;
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;

  std::size_t size() const { return s.size(); }
  bool operator==(const HeadScores&) const = default;
};

/// Without `sample_size` (or when it covers every ordered pair, or the store
/// has a single chunk) all n^2 ordered pairs are visited. Otherwise
/// `sample_size` distinct ordered pairs are drawn uniformly without
/// replacement using `seed`; the same pairs are used for every space.
RawHeadStats raw_head_stats(const MultiSpaceStore& store,
                            std::optional<std::size_t> sample_size = std::nullopt,
                            std::uint64_t seed = 0, std::size_t jobs = 1);

/// Divides a and b by their maxima (an all-zero component stays zero).
HeadScores scale_scores(const RawHeadStats& raw);

HeadScores compute_scores(const MultiSpaceStore& store,
                          std::optional<std::size_t> sample_size = std::nullopt,
                          std::uint64_t seed = 0, std::size_t jobs = 1);

// Sidecar: {"a": [...], "b": [...], "s": [...], "sample_size": n|null, "seed": n}
std::string scores_to_json(const HeadScores& scores);
HeadScores parse_scores(std::string_view json_text);
HeadScores read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const HeadScores& scores);

}  // namespace mhrag
