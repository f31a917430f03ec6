#include "mhrag/planted.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

#include "mhrag/error.hpp"
#include "mhrag/random.hpp"

namespace mhrag {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) {
  return splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ b) ^ c);
}

Vector gaussian(Rng& rng, std::size_t dim, double scale) {
  Vector v(dim);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

Vector unit(Rng& rng, std::size_t dim) {
  Vector v = gaussian(rng, dim, 1.0);
  const double n = l2_norm(v);
  for (auto& x : v) x /= n;
  return v;
}

enum Stream : std::uint64_t { kCenters = 1, kDocuments = 2, kQueryNoise = 3 };

}  // namespace

void PlantedCorpusSpec::validate() const {
  if (h == 0 || d_head == 0) throw UsageError("planted: h and d_head must be positive");
  if (num_categories < 2) throw UsageError("planted: need at least 2 categories");
  if (docs_per_category == 0) throw UsageError("planted: docs_per_category must be positive");
  if (!(cluster_spread >= 0.0) || !std::isfinite(cluster_spread)) {
    throw UsageError("planted: cluster_spread must be finite and non-negative");
  }
  if (!(identity_scale > 0.0) || identity_scale >= 0.5) {
    throw UsageError("planted: identity_scale must lie in (0, 0.5)");
  }
  if (!(salience_gain > 0.0)) throw UsageError("planted: salience_gain must be positive");
}

PlantedGenerator::PlantedGenerator(PlantedCorpusSpec spec, std::uint64_t seed)
    : spec_(spec), seed_(seed) {
  spec_.validate();

  Rng rng(stream_seed(seed_, kCenters));
  centers_.resize(spec_.num_categories);
  for (auto& per_head : centers_) {
    per_head.reserve(spec_.h);
    for (std::size_t j = 0; j < spec_.h; ++j) per_head.push_back(unit(rng, spec_.d_head));
  }
  separation_ = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spec_.h; ++j) {
    for (std::size_t a = 0; a < spec_.num_categories; ++a) {
      for (std::size_t b = a + 1; b < spec_.num_categories; ++b) {
        double d2 = 0.0;
        for (std::size_t x = 0; x < spec_.d_head; ++x) {
          const double diff = centers_[a][j][x] - centers_[b][j][x];
          d2 += diff * diff;
        }
        separation_ = std::min(separation_, std::sqrt(d2));
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(spec_.h * spec_.d_head);
  Rng mix_rng(spec_.mixing_seed);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = mix_rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix column signs so that R has a positive diagonal; makes Q unique.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < n; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  mixing_.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index c = 0; c < n; ++c) {
      mixing_[static_cast<std::size_t>(row * n + c)] = q(row, c);
    }
  }
}

std::string PlantedGenerator::category_name(std::size_t category) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "category-%02zu", category);
  return buf;
}

std::string PlantedGenerator::document_id(std::size_t category, std::size_t doc) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "c%02zu-d%03zu", category, doc);
  return buf;
}

std::vector<Vector> PlantedGenerator::document_heads(std::size_t category,
                                                     std::size_t doc) const {
  Rng rng(stream_seed(seed_, kDocuments, category, doc));
  const double rho = spec_.identity_scale * separation_;
  const double xi_scale = 1.0 / std::sqrt(static_cast<double>(spec_.d_head));
  std::vector<Vector> heads;
  heads.reserve(spec_.h);
  for (std::size_t j = 0; j < spec_.h; ++j) {
    const Vector iota = unit(rng, spec_.d_head);
    const Vector xi = gaussian(rng, spec_.d_head, xi_scale);
    const double gain = (category % spec_.h == j) ? spec_.salience_gain : 1.0;
    Vector v(spec_.d_head);
    for (std::size_t x = 0; x < spec_.d_head; ++x) {
      v[x] = gain * (centers_[category][j][x] + rho * iota[x] + spec_.cluster_spread * xi[x]);
    }
    heads.push_back(std::move(v));
  }
  return heads;
}

Vector PlantedGenerator::mix(std::span<const double> x) const {
  const std::size_t n = spec_.h * spec_.d_head;
  if (x.size() != n) throw DataError("mix: expected a vector of length " + std::to_string(n));
  Vector y(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) sum += mixing_[r * n + c] * x[c];
    y[r] = sum;
  }
  return y;
}

Vector PlantedGenerator::unmix(std::span<const double> y) const {
  const std::size_t n = spec_.h * spec_.d_head;
  if (y.size() != n) throw DataError("unmix: expected a vector of length " + std::to_string(n));
  Vector x(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) x[c] += mixing_[r * n + c] * y[r];
  }
  return x;
}

PlantedCorpus PlantedGenerator::generate() const {
  if (!(spec_.cluster_spread < separation_)) {
    throw UsageError("planted: cluster_spread " + std::to_string(spec_.cluster_spread) +
                     " must be below the inter-cluster separation " +
                     std::to_string(separation_));
  }
  PlantedCorpus corpus;
  corpus.manifest.h = spec_.h;
  corpus.manifest.d_head = spec_.d_head;
  corpus.manifest.d_full = spec_.h * spec_.d_head;
  corpus.manifest.model_tag = "planted";
  corpus.manifest.layer_index = 0;
  corpus.records.reserve(spec_.num_categories * spec_.docs_per_category);
  for (std::size_t c = 0; c < spec_.num_categories; ++c) {
    const auto name = category_name(c);
    for (std::size_t d = 0; d < spec_.docs_per_category; ++d) {
      CorpusRecord rec;
      rec.chunk.id = document_id(c, d);
      rec.chunk.text = "Planted document " + std::to_string(d) + " of " + name + ".";
      rec.chunk.category = name;
      rec.embedding = MultiAspectEmbedding(document_heads(c, d));
      rec.standard = mix(rec.embedding.concatenated());
      corpus.categories.emplace(rec.chunk.id, name);
      corpus.records.push_back(std::move(rec));
    }
  }
  return corpus;
}

std::vector<CategorySpec> PlantedGenerator::category_specs() const {
  std::vector<CategorySpec> out;
  for (std::size_t c = 0; c < spec_.num_categories; ++c) {
    CategorySpec cat{category_name(c), {}};
    for (std::size_t d = 0; d < spec_.docs_per_category; ++d) {
      const auto id = document_id(c, d);
      cat.documents.push_back({id, id, "Planted document " + std::to_string(d) + " of " +
                                           cat.name + "."});
    }
    out.push_back(std::move(cat));
  }
  return out;
}

QueryEmbedding PlantedGenerator::embed_plan(const QueryPlan& plan, double query_noise,
                                            std::uint64_t seed) const {
  const std::size_t n = plan.picks.size();
  if (n == 0) throw UsageError("plan has no picks");
  std::vector<std::vector<Vector>> pick_heads;
  pick_heads.reserve(n);
  for (const auto& pick : plan.picks) {
    unsigned c = 0, d = 0;
    if (std::sscanf(pick.document_id.c_str(), "c%u-d%u", &c, &d) != 2 ||
        c >= spec_.num_categories || d >= spec_.docs_per_category) {
      throw DataError("not a planted document id: '" + pick.document_id + "'");
    }
    pick_heads.push_back(document_heads(c, d));
  }

  Rng rng(stream_seed(seed_, kQueryNoise, seed));
  const double noise_scale = query_noise / std::sqrt(static_cast<double>(spec_.d_head));
  std::vector<Vector> heads(spec_.h, Vector(spec_.d_head, 0.0));
  for (std::size_t j = 0; j < spec_.h; ++j) {
    for (std::size_t m = 0; m < n; ++m) {
      const bool assigned = n <= spec_.h ? (j % n == m) : (m % spec_.h == j);
      if (!assigned) continue;
      for (std::size_t x = 0; x < spec_.d_head; ++x) heads[j][x] += pick_heads[m][j][x];
    }
    if (query_noise > 0.0) {
      for (auto& x : heads[j]) x += noise_scale * rng.normal();
    }
  }
  QueryEmbedding q;
  q.heads = MultiAspectEmbedding(std::move(heads));
  q.standard = mix(q.heads.concatenated());
  return q;
}

PlantedCorpus generate_planted(const PlantedCorpusSpec& spec, std::uint64_t seed) {
  return PlantedGenerator(spec, seed).generate();
}

PlantedQuerySet planted_queries(const PlantedGenerator& generator,
                                std::span<const std::size_t> aspect_counts,
                                std::size_t queries_per_count, double query_noise,
                                std::uint64_t seed) {
  const auto categories = generator.category_specs();
  const auto plans = sample_query_plans(categories, aspect_counts, queries_per_count, seed);
  PlantedQuerySet set;
  std::map<std::size_t, std::size_t> per_count;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    char id[32];
    std::snprintf(id, sizeof(id), "a%02zu-q%03zu", plan.aspects, per_count[plan.aspects]++);
    EvalQuery q;
    q.id = id;
    q.aspects = plan.aspects;
    q.text = std::string("planted query ") + id + ":";
    for (const auto& pick : plan.picks) {
      q.ground_truth.push_back({pick.document_id, pick.category});
      q.text += " " + pick.document_id;
    }
    QueryEmbedding e = generator.embed_plan(plan, query_noise, stream_seed(seed, i));
    e.id = q.id;
    e.text = q.text;
    set.queries.push_back(std::move(q));
    set.embeddings.push_back(std::move(e));
  }
  return set;
}

}  // namespace mhrag
