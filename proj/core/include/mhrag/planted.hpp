#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mhrag/datagen.hpp"
#include "mhrag/evaluation.hpp"
#include "mhrag/types.hpp"

namespace mhrag {

/// Synthetic corpus with known per-head cluster structure.
///
/// Every category c has a unit-norm center mu[c][j] in every head space j.
/// Document d of category c has, in head j,
///
///   gain(c, j) * (mu[c][j] + rho * iota[d][j] + sigma * xi[d][j])
///
/// where iota is a random unit "identity" direction (rho = identity_scale *
/// separation), xi ~ N(0, I / d_head), and gain is `salience_gain` on the
/// category's designated head (c mod h) and 1 elsewhere. The standard vector
/// is a fixed random orthogonal map applied to the concatenated heads, so
/// contiguous slices of it do not line up with head spaces.
struct PlantedCorpusSpec {
  std::size_t h = 8;
  std::size_t d_head = 16;
  std::size_t num_categories = 25;
  std::size_t docs_per_category = 50;
  double cluster_spread = 0.0;  // sigma
  double identity_scale = 0.25;
  double salience_gain = 2.0;
  std::uint64_t mixing_seed = 1;

  void validate() const;
};

struct PlantedCorpus {
  StoreManifest manifest;
  std::vector<CorpusRecord> records;
  /// Document id -> category name.
  std::map<std::string, std::string> categories;
};

class PlantedGenerator {
 public:
  /// Validates `spec` and draws centers and the mixing map.
  PlantedGenerator(PlantedCorpusSpec spec, std::uint64_t seed);

  const PlantedCorpusSpec& spec() const { return spec_; }
  /// Minimum distance between two category centers within one head space.
  double separation() const { return separation_; }
  const std::vector<Vector>& centers(std::size_t category) const { return centers_.at(category); }

  /// Throws UsageError unless cluster_spread < separation().
  PlantedCorpus generate() const;

  /// Category and document listing in the shape sample_query_plans expects.
  std::vector<CategorySpec> category_specs() const;

  /// Query embedding for a plan. Pick m is placed on heads j with
  /// j mod n == m when n <= h; with n > h, head j carries the sum of picks
  /// m with m mod h == j. Each pick contributes its document's own head
  /// vector; `query_noise` adds N(0, noise^2 I / d_head) per head.
  QueryEmbedding embed_plan(const QueryPlan& plan, double query_noise,
                            std::uint64_t seed) const;

  Vector mix(std::span<const double> concatenated) const;
  Vector unmix(std::span<const double> standard) const;

  static std::string category_name(std::size_t category);
  static std::string document_id(std::size_t category, std::size_t doc);

 private:
  std::vector<Vector> document_heads(std::size_t category, std::size_t doc) const;

  PlantedCorpusSpec spec_;
  std::uint64_t seed_;
  std::vector<std::vector<Vector>> centers_;  // [category][head]
  double separation_ = 0.0;
  std::vector<double> mixing_;  // d_full x d_full, row-major, orthogonal
};

PlantedCorpus generate_planted(const PlantedCorpusSpec& spec, std::uint64_t seed);

struct PlantedQuerySet {
  std::vector<EvalQuery> queries;
  std::vector<QueryEmbedding> embeddings;
};

/// Samples plans over the generator's categories and embeds each one.
PlantedQuerySet planted_queries(const PlantedGenerator& generator,
                                std::span<const std::size_t> aspect_counts,
                                std::size_t queries_per_count, double query_noise,
                                std::uint64_t seed);

}  // namespace mhrag
