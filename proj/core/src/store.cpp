#include "mhrag/store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mhrag/error.hpp"

namespace mhrag {

Vector MultiAspectEmbedding::concatenated() const {
  Vector out;
  out.reserve(head_count() * head_dim());
  for (const auto& h : heads_) {
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

void StoreManifest::validate() const {
  if (h == 0 || d_head == 0) {
    throw DataError("manifest: h and d_head must be positive");
  }
  if (d_full != h * d_head) {
    std::ostringstream msg;
    msg << "manifest: d_full (" << d_full << ") must equal h * d_head (" << h * d_head << ")";
    throw DataError(msg.str());
  }
  if (distance != kCosineDistance) {
    throw DataError("manifest: unsupported distance '" + distance + "' (only 'cosine')");
  }
}

namespace {

void check_vector(const std::string& id, std::string_view what, std::span<const double> v,
                  std::size_t expected_dim) {
  if (v.size() != expected_dim) {
    std::ostringstream msg;
    msg << "record '" << id << "': " << what << " dimension mismatch (expected "
        << expected_dim << ", got " << v.size() << ")";
    throw DataError(msg.str());
  }
  if (!all_finite(v)) {
    throw DataError("record '" + id + "': " + std::string(what) + " has a non-finite value");
  }
  if (l2_norm(v) == 0.0) {
    throw DataError("record '" + id + "': " + std::string(what) + " is a zero vector");
  }
}

void check_query(std::span<const double> query, std::size_t dim) {
  if (query.size() != dim) {
    std::ostringstream msg;
    msg << "query dimension mismatch (expected " << dim << ", got " << query.size() << ")";
    throw DataError(msg.str());
  }
  if (!all_finite(query) || l2_norm(query) == 0.0) {
    throw DataError("query vector must be finite and nonzero");
  }
}

}  // namespace

std::optional<std::size_t> MultiSpaceStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& MultiSpaceStore::category_of(std::string_view id) const {
  auto idx = find(id);
  if (!idx) throw DataError("unknown chunk id '" + std::string(id) + "'");
  return chunks_[*idx].category;
}

std::span<const double> MultiSpaceStore::head_vector(std::size_t space,
                                                     std::size_t index) const {
  const Space& s = spaces_.at(space);
  return std::span<const double>(s.values).subspan(index * s.dim, s.dim);
}

std::span<const double> MultiSpaceStore::standard_vector(std::size_t index) const {
  if (!has_standard_) throw DataError("store has no standard vectors");
  return std::span<const double>(standard_.values).subspan(index * standard_.dim, standard_.dim);
}

std::vector<Neighbor> MultiSpaceStore::scan(const Space& space, std::span<const double> query,
                                            std::size_t count) const {
  if (count == 0) throw UsageError("neighbor count must be positive");
  check_query(query, space.dim);
  const double query_sq = dot(query, query);
  const std::size_t n = size();

  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> row(space.values.data() + i * space.dim, space.dim);
    dist[i] = cosine_distance(dot(query, row), query_sq, space.sq_norms[i]);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(count, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return id_rank_[a] < id_rank_[b];
                    });

  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({chunks_[order[i]].id, dist[order[i]]});
  }
  return out;
}

std::vector<Neighbor> MultiSpaceStore::nearest(std::size_t space, std::span<const double> query,
                                               std::size_t c) const {
  if (space >= spaces_.size()) {
    std::ostringstream msg;
    msg << "space index " << space << " out of range (h=" << spaces_.size() << ")";
    throw UsageError(msg.str());
  }
  return scan(spaces_[space], query, c);
}

std::vector<Neighbor> MultiSpaceStore::nearest_standard(std::span<const double> query,
                                                        std::size_t k) const {
  if (!has_standard_) throw DataError("store has no standard vectors");
  return scan(standard_, query, k);
}

std::vector<CorpusRecord> MultiSpaceStore::export_records() const {
  std::vector<CorpusRecord> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    std::vector<Vector> heads;
    heads.reserve(manifest_.h);
    for (std::size_t s = 0; s < manifest_.h; ++s) {
      auto v = head_vector(s, i);
      heads.emplace_back(v.begin(), v.end());
    }
    CorpusRecord rec{chunks_[i], MultiAspectEmbedding(std::move(heads)), std::nullopt};
    if (has_standard_) {
      auto v = standard_vector(i);
      rec.standard = Vector(v.begin(), v.end());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

StoreBuilder::StoreBuilder(StoreManifest manifest) {
  manifest.validate();
  store_.manifest_ = std::move(manifest);
  store_.spaces_.resize(store_.manifest_.h);
  for (auto& s : store_.spaces_) s.dim = store_.manifest_.d_head;
  store_.standard_.dim = store_.manifest_.d_full;
}

void StoreBuilder::add(CorpusRecord record) {
  const auto& m = store_.manifest_;
  const std::string& id = record.chunk.id;
  if (id.empty()) throw DataError("record with empty id");
  if (record.chunk.text.empty()) throw DataError("record '" + id + "': empty text");
  if (store_.index_.contains(id)) throw DataError("duplicate chunk id '" + id + "'");

  const auto& emb = record.embedding;
  if (emb.head_count() != m.h) {
    std::ostringstream msg;
    msg << "record '" << id << "': head count mismatch (expected " << m.h << ", got "
        << emb.head_count() << ")";
    throw DataError(msg.str());
  }
  for (std::size_t s = 0; s < m.h; ++s) {
    check_vector(id, "head " + std::to_string(s), emb.head(s), m.d_head);
  }
  const bool has_std = record.standard.has_value();
  if (standard_presence_ && *standard_presence_ != has_std) {
    throw DataError("record '" + id +
                    "': standard vector must be present on all records or on none");
  }
  standard_presence_ = has_std;
  if (has_std) check_vector(id, "standard vector", *record.standard, m.d_full);

  for (std::size_t s = 0; s < m.h; ++s) {
    auto v = emb.head(s);
    auto& space = store_.spaces_[s];
    space.values.insert(space.values.end(), v.begin(), v.end());
    space.sq_norms.push_back(dot(v, v));
  }
  if (has_std) {
    store_.standard_.values.insert(store_.standard_.values.end(), record.standard->begin(),
                                   record.standard->end());
    store_.standard_.sq_norms.push_back(dot(*record.standard, *record.standard));
  }
  store_.index_.emplace(id, store_.chunks_.size());
  store_.chunks_.push_back(std::move(record.chunk));
}

MultiSpaceStore StoreBuilder::seal() && {
  auto& st = store_;
  st.has_standard_ = standard_presence_.value_or(false);
  const std::size_t n = st.chunks_.size();
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return st.chunks_[a].id < st.chunks_[b].id; });
  st.id_rank_.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) st.id_rank_[by_id[r]] = r;
  return std::move(st);
}

MultiSpaceStore ingest(const StoreManifest& manifest, std::vector<CorpusRecord> records) {
  StoreBuilder builder(manifest);
  for (auto& r : records) builder.add(std::move(r));
  return std::move(builder).seal();
}

}  // namespace mhrag
