#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhrag/vector_math.hpp"

namespace mhrag {

/// One text chunk of the corpus.
struct ChunkRecord {
  std::string id;
  std::string text;
  std::string category;
  std::optional<std::string> source;

  bool operator==(const ChunkRecord&) const = default;
};

/// The outputs of all h attention heads for one text: h vectors of d_head
/// values each, in head order.
class MultiAspectEmbedding {
 public:
  MultiAspectEmbedding() = default;
  explicit MultiAspectEmbedding(std::vector<Vector> heads) : heads_(std::move(heads)) {}

  std::size_t head_count() const { return heads_.size(); }
  /// Dimension of the first head; 0 when empty.
  std::size_t head_dim() const { return heads_.empty() ? 0 : heads_.front().size(); }

  std::span<const double> head(std::size_t i) const { return heads_.at(i); }
  const std::vector<Vector>& heads() const { return heads_; }

  /// Heads concatenated in order (length h * d_head).
  Vector concatenated() const;

  bool operator==(const MultiAspectEmbedding&) const = default;

 private:
  std::vector<Vector> heads_;
};

inline constexpr const char* kCosineDistance = "cosine";

struct StoreManifest {
  std::size_t h = 0;
  std::size_t d_head = 0;
  std::size_t d_full = 0;
  std::string distance = kCosineDistance;
  std::string model_tag;
  int layer_index = -1;

  /// Throws DataError when the geometry is inconsistent.
  void validate() const;

  bool operator==(const StoreManifest&) const = default;
};

/// A chunk together with its embeddings, as carried by the interchange
/// format.
struct CorpusRecord {
  ChunkRecord chunk;
  MultiAspectEmbedding embedding;
  std::optional<Vector> standard;

  bool operator==(const CorpusRecord&) const = default;
};

/// Query-side embeddings. `standard` is needed by Standard and Split
/// retrieval only.
struct QueryEmbedding {
  std::string id;
  std::string text;
  MultiAspectEmbedding heads;
  std::optional<Vector> standard;
};

}  // namespace mhrag
