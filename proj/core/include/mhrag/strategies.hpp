#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhrag/providers.hpp"
#include "mhrag/scoring.hpp"
#include "mhrag/store.hpp"

namespace mhrag {

struct ScoredChunk {
  std::string id;
  double weight = 0.0;

  bool operator==(const ScoredChunk&) const = default;
};

/// Final ranking of a strategy: unique ids, weights non-increasing (ties in
/// ascending id order), at most k entries.
struct RankedRetrieval {
  std::vector<ScoredChunk> entries;
  std::string strategy_tag;
  std::size_t k = 0;

  std::vector<std::string> ids() const;
  bool operator==(const RankedRetrieval&) const = default;
};

enum class StrategyKind { standard, mrag, split, mrag1, mrag2, split1, split2, fusion };

std::string_view to_string(StrategyKind kind);
/// Throws UsageError for unknown names.
StrategyKind parse_strategy_kind(std::string_view name);
bool uses_split_store(StrategyKind kind);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::mrag;
  std::size_t k = 10;
  /// Per-space list length; k when unset.
  std::optional<std::size_t> c;
  /// Fusion only: the strategy run for every generated question.
  std::shared_ptr<const StrategyConfig> base;
  /// Fusion only.
  std::size_t num_questions = 3;

  std::size_t per_space() const { return c.value_or(k); }
  /// "mrag", "split2", "fusion-mrag", ...
  std::string tag() const;
  void validate() const;
};

/// How a chunk at 0-based position p of space i's list is weighted.
enum class VoteWeighting {
  scored,            // s_i * 2^-p
  positional,        // 2^-p
  inverse_distance,  // 1 / max(distance, kMinVoteDistance)
};

inline constexpr double kMinVoteDistance = 1e-9;

/// Standard RAG: top-k over the full-dimension vectors, weight = -distance.
RankedRetrieval retrieve_standard(const MultiSpaceStore& store, std::span<const double> query,
                                  std::size_t k);

/// Voting over the h per-space top-c lists. Weights of a chunk listed in
/// several spaces are summed; result sorted by weight descending, ascending
/// id on ties, truncated to k. `scores` may be null unless weighting is
/// `scored`.
RankedRetrieval vote(const MultiSpaceStore& store, const HeadScores* scores,
                     const MultiAspectEmbedding& query, std::size_t k, std::size_t c,
                     VoteWeighting weighting, std::string tag);

RankedRetrieval retrieve_mrag(const MultiSpaceStore& store, const HeadScores& scores,
                              const MultiAspectEmbedding& query, std::size_t k, std::size_t c);

/// Store whose space i holds the i-th contiguous d_head slice of each
/// standard vector.
MultiSpaceStore split_store(const MultiSpaceStore& store);
/// The matching slicing of a full-dimension query vector.
MultiAspectEmbedding split_query(std::span<const double> full, std::size_t h);

/// Everything a strategy may need. Pointers a given strategy does not use
/// may stay null.
struct RetrievalContext {
  const MultiSpaceStore* store = nullptr;
  const HeadScores* scores = nullptr;
  const MultiSpaceStore* split = nullptr;
  const HeadScores* split_scores = nullptr;
  QuestionGenerator* questions = nullptr;
  EmbeddingProvider* embedder = nullptr;
};

/// mrag1 / mrag2 over the head spaces, split1 / split2 over the split store.
RankedRetrieval retrieve_variant(StrategyKind kind, const RetrievalContext& ctx,
                                 const QueryEmbedding& query, std::size_t k, std::size_t c);

/// Generates `num_questions` questions, runs `base` for each one and merges:
/// each question's weights are min-max normalized to [0, 1] (all 1 when the
/// list is constant), then summed per chunk.
RankedRetrieval retrieve_fusion(const RetrievalContext& ctx, const StrategyConfig& base,
                                QuestionGenerator& questions, EmbeddingProvider& embedder,
                                std::string_view query_text, std::size_t num_questions,
                                std::size_t k);

/// Dispatches on config.kind.
RankedRetrieval retrieve(const RetrievalContext& ctx, const StrategyConfig& config,
                         const QueryEmbedding& query);

}  // namespace mhrag
