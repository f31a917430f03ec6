#include "mhrag/strategies.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "mhrag/error.hpp"

namespace mhrag {

std::vector<std::string> RankedRetrieval::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 8> kKindNames{{
    {StrategyKind::standard, "standard"},
    {StrategyKind::mrag, "mrag"},
    {StrategyKind::split, "split"},
    {StrategyKind::mrag1, "mrag1"},
    {StrategyKind::mrag2, "mrag2"},
    {StrategyKind::split1, "split1"},
    {StrategyKind::split2, "split2"},
    {StrategyKind::fusion, "fusion"},
}};

// Sorts accumulated weights (descending, ascending id on ties) and keeps k.
RankedRetrieval finalize(const std::map<std::string, double>& weights, std::size_t k,
                         std::string tag) {
  RankedRetrieval out;
  out.strategy_tag = std::move(tag);
  out.k = k;
  out.entries.reserve(weights.size());
  for (const auto& [id, w] : weights) out.entries.push_back({id, w});
  // std::map iterates in ascending id order, so a stable sort keeps id order on ties.
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const ScoredChunk& a, const ScoredChunk& b) { return a.weight > b.weight; });
  if (out.entries.size() > k) out.entries.resize(k);
  return out;
}

void require_positive(std::size_t value, const char* what) {
  if (value == 0) throw UsageError(std::string(what) + " must be positive");
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw UsageError("unknown strategy '" + std::string(name) + "'");
}

bool uses_split_store(StrategyKind kind) {
  return kind == StrategyKind::split || kind == StrategyKind::split1 ||
         kind == StrategyKind::split2;
}

std::string StrategyConfig::tag() const {
  if (kind == StrategyKind::fusion && base) return "fusion-" + base->tag();
  return std::string(to_string(kind));
}

void StrategyConfig::validate() const {
  require_positive(k, "k");
  if (c) require_positive(*c, "c");
  if (kind == StrategyKind::fusion) {
    if (!base) throw UsageError("fusion strategy requires a base strategy");
    if (base->kind == StrategyKind::fusion) throw UsageError("fusion base must not be fusion");
    require_positive(num_questions, "num_questions");
    base->validate();
  }
}

RankedRetrieval retrieve_standard(const MultiSpaceStore& store, std::span<const double> query,
                                  std::size_t k) {
  require_positive(k, "k");
  if (!store.has_standard()) throw DataError("store has no standard vectors");
  RankedRetrieval out;
  out.strategy_tag = "standard";
  out.k = k;
  for (auto& n : store.nearest_standard(query, k)) {
    out.entries.push_back({std::move(n.id), -n.distance});
  }
  return out;
}

RankedRetrieval vote(const MultiSpaceStore& store, const HeadScores* scores,
                     const MultiAspectEmbedding& query, std::size_t k, std::size_t c,
                     VoteWeighting weighting, std::string tag) {
  require_positive(k, "k");
  require_positive(c, "c");
  const std::size_t h = store.space_count();
  if (query.head_count() != h) {
    std::ostringstream msg;
    msg << "query has " << query.head_count() << " heads, store has " << h;
    throw DataError(msg.str());
  }
  if (weighting == VoteWeighting::scored) {
    if (scores == nullptr) throw UsageError("scored voting requires head scores");
    if (scores->size() != h) {
      std::ostringstream msg;
      msg << "head scores have " << scores->size() << " entries, store has " << h << " spaces";
      throw DataError(msg.str());
    }
  }

  std::map<std::string, double> weights;
  for (std::size_t i = 0; i < h; ++i) {
    const auto list = store.nearest(i, query.head(i), c);
    for (std::size_t p = 0; p < list.size(); ++p) {
      double w = 0.0;
      switch (weighting) {
        case VoteWeighting::scored:
          w = scores->s[i] * std::ldexp(1.0, -static_cast<int>(p));
          break;
        case VoteWeighting::positional:
          w = std::ldexp(1.0, -static_cast<int>(p));
          break;
        case VoteWeighting::inverse_distance:
          w = 1.0 / std::max(list[p].distance, kMinVoteDistance);
          break;
      }
      weights[list[p].id] += w;
    }
  }
  return finalize(weights, k, std::move(tag));
}

RankedRetrieval retrieve_mrag(const MultiSpaceStore& store, const HeadScores& scores,
                              const MultiAspectEmbedding& query, std::size_t k, std::size_t c) {
  return vote(store, &scores, query, k, c, VoteWeighting::scored, "mrag");
}

MultiSpaceStore split_store(const MultiSpaceStore& store) {
  if (!store.has_standard()) throw DataError("split requires standard vectors");
  StoreManifest m = store.manifest();
  if (m.d_full % m.h != 0) throw DataError("d_full is not divisible by h");
  m.d_head = m.d_full / m.h;

  StoreBuilder builder(m);
  for (std::size_t idx = 0; idx < store.size(); ++idx) {
    auto full = store.standard_vector(idx);
    CorpusRecord rec{store.chunk(idx), split_query(full, m.h), std::nullopt};
    rec.standard = Vector(full.begin(), full.end());
    builder.add(std::move(rec));
  }
  return std::move(builder).seal();
}

MultiAspectEmbedding split_query(std::span<const double> full, std::size_t h) {
  if (h == 0 || full.size() % h != 0) {
    throw DataError("vector of length " + std::to_string(full.size()) +
                    " cannot be split into " + std::to_string(h) + " parts");
  }
  const std::size_t d = full.size() / h;
  std::vector<Vector> heads;
  heads.reserve(h);
  for (std::size_t i = 0; i < h; ++i) {
    auto part = full.subspan(i * d, d);
    heads.emplace_back(part.begin(), part.end());
  }
  return MultiAspectEmbedding(std::move(heads));
}

namespace {

const MultiSpaceStore& need_store(const RetrievalContext& ctx) {
  if (ctx.store == nullptr) throw UsageError("retrieval context has no store");
  return *ctx.store;
}

std::span<const double> need_standard_query(const QueryEmbedding& q) {
  if (!q.standard) throw DataError("query '" + q.id + "' has no standard embedding");
  return *q.standard;
}

}  // namespace

RankedRetrieval retrieve_variant(StrategyKind kind, const RetrievalContext& ctx,
                                 const QueryEmbedding& query, std::size_t k, std::size_t c) {
  const auto tag = std::string(to_string(kind));
  switch (kind) {
    case StrategyKind::mrag1:
      return vote(need_store(ctx), nullptr, query.heads, k, c, VoteWeighting::positional, tag);
    case StrategyKind::mrag2:
      return vote(need_store(ctx), nullptr, query.heads, k, c, VoteWeighting::inverse_distance,
                  tag);
    case StrategyKind::split:
    case StrategyKind::split1:
    case StrategyKind::split2: {
      if (ctx.split == nullptr) throw UsageError("split strategies need a split store");
      const auto sliced = split_query(need_standard_query(query), ctx.split->space_count());
      if (kind == StrategyKind::split1) {
        return vote(*ctx.split, nullptr, sliced, k, c, VoteWeighting::positional, tag);
      }
      if (ctx.split_scores == nullptr) throw UsageError("split voting needs split-store scores");
      return vote(*ctx.split, ctx.split_scores, sliced, k, c, VoteWeighting::scored, tag);
    }
    default:
      throw UsageError("'" + tag + "' is not a voting variant");
  }
}

RankedRetrieval retrieve_fusion(const RetrievalContext& ctx, const StrategyConfig& base,
                                QuestionGenerator& questions, EmbeddingProvider& embedder,
                                std::string_view query_text, std::size_t num_questions,
                                std::size_t k) {
  require_positive(k, "k");
  require_positive(num_questions, "num_questions");
  if (base.kind == StrategyKind::fusion) throw UsageError("fusion base must not be fusion");

  std::vector<std::string> generated;
  try {
    generated = questions.generate(query_text, num_questions);
  } catch (const QuestionGenerationError&) {
    throw;
  } catch (const std::exception& e) {
    throw QuestionGenerationError(std::string("question generation failed: ") + e.what());
  }
  if (generated.empty()) throw QuestionGenerationError("question generator returned nothing");
  if (generated.size() > num_questions) generated.resize(num_questions);

  const auto embedded = embedder.embed_batch(generated);
  std::map<std::string, double> merged;
  for (const auto& q : embedded) {
    const auto ranked = retrieve(ctx, base, q);
    if (ranked.entries.empty()) continue;
    auto [lo, hi] = std::minmax_element(
        ranked.entries.begin(), ranked.entries.end(),
        [](const ScoredChunk& a, const ScoredChunk& b) { return a.weight < b.weight; });
    const double min = lo->weight;
    const double range = hi->weight - min;
    for (const auto& e : ranked.entries) {
      merged[e.id] += range > 0.0 ? (e.weight - min) / range : 1.0;
    }
  }
  return finalize(merged, k, "fusion-" + base.tag());
}

RankedRetrieval retrieve(const RetrievalContext& ctx, const StrategyConfig& config,
                         const QueryEmbedding& query) {
  config.validate();
  switch (config.kind) {
    case StrategyKind::standard:
      return retrieve_standard(need_store(ctx), need_standard_query(query), config.k);
    case StrategyKind::mrag:
      if (ctx.scores == nullptr) throw UsageError("mrag needs head scores");
      return retrieve_mrag(need_store(ctx), *ctx.scores, query.heads, config.k,
                           config.per_space());
    case StrategyKind::fusion:
      if (ctx.questions == nullptr || ctx.embedder == nullptr) {
        throw UsageError("fusion needs a question generator and an embedding provider");
      }
      return retrieve_fusion(ctx, *config.base, *ctx.questions, *ctx.embedder, query.text,
                             config.num_questions, config.k);
    default:
      return retrieve_variant(config.kind, ctx, query, config.k, config.per_space());
  }
}

}  // namespace mhrag
