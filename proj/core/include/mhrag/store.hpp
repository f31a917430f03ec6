#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mhrag/types.hpp"

namespace mhrag {

struct Neighbor {
  std::string id;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// h parallel embedding spaces over one chunk collection, plus an optional
/// full-dimension space for the Standard RAG baseline.
///
/// A store is only obtainable from StoreBuilder::seal() (or ingest()), and is
/// immutable afterwards, so a const reference may be shared across threads.
/// Nearest-neighbor search is an exact flat scan; ties are broken by
/// ascending chunk id.
class MultiSpaceStore {
 public:
  const StoreManifest& manifest() const { return manifest_; }
  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  std::size_t space_count() const { return manifest_.h; }
  bool has_standard() const { return has_standard_; }

  /// Chunks in ingestion order.
  const std::vector<ChunkRecord>& chunks() const { return chunks_; }
  const ChunkRecord& chunk(std::size_t index) const { return chunks_.at(index); }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Category of a chunk; throws DataError when the id is unknown.
  const std::string& category_of(std::string_view id) const;

  std::span<const double> head_vector(std::size_t space, std::size_t index) const;
  std::span<const double> standard_vector(std::size_t index) const;

  /// The min(c, size()) chunks of `space` closest to `query`, ascending by
  /// cosine distance.
  std::vector<Neighbor> nearest(std::size_t space, std::span<const double> query,
                                std::size_t c) const;
  /// Same contract over the full-dimension standard vectors.
  std::vector<Neighbor> nearest_standard(std::span<const double> query, std::size_t k) const;

  /// Records in ingestion order, as they were ingested.
  std::vector<CorpusRecord> export_records() const;

 private:
  friend class StoreBuilder;

  struct Space {
    std::size_t dim = 0;
    std::vector<double> values;  // row-major, size() x dim
    std::vector<double> sq_norms;
  };

  std::vector<Neighbor> scan(const Space& space, std::span<const double> query,
                             std::size_t count) const;

  StoreManifest manifest_;
  std::vector<ChunkRecord> chunks_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> id_rank_;
  std::vector<Space> spaces_;
  Space standard_;
  bool has_standard_ = false;
};

/// Single-writer ingestion. Each add() validates the record against the
/// manifest; seal() hands out the immutable store.
class StoreBuilder {
 public:
  explicit StoreBuilder(StoreManifest manifest);

  void add(CorpusRecord record);
  std::size_t size() const { return store_.chunks_.size(); }

  MultiSpaceStore seal() &&;

 private:
  MultiSpaceStore store_;
  std::optional<bool> standard_presence_;
};

MultiSpaceStore ingest(const StoreManifest& manifest, std::vector<CorpusRecord> records);

}  // namespace mhrag
