#include <benchmark/benchmark.h>

#include "mhrag/random.hpp"
#include "mhrag/scoring.hpp"
#include "mhrag/store.hpp"
#include "mhrag/strategies.hpp"

namespace {

using namespace mhrag;

MultiSpaceStore make_store(std::size_t n, std::size_t h, std::size_t d) {
  Rng rng(1);
  StoreManifest m;
  m.h = h;
  m.d_head = d;
  m.d_full = h * d;
  StoreBuilder b(m);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Vector> heads(h, Vector(d));
    for (auto& v : heads)
      for (auto& x : v) x = rng.normal();
    CorpusRecord r;
    r.chunk.id = "c" + std::to_string(i);
    r.chunk.text = r.chunk.id;
    r.embedding = MultiAspectEmbedding(heads);
    r.standard = r.embedding.concatenated();
    b.add(std::move(r));
  }
  return std::move(b).seal();
}

MultiAspectEmbedding make_query(std::size_t h, std::size_t d) {
  Rng rng(2);
  std::vector<Vector> heads(h, Vector(d));
  for (auto& v : heads)
    for (auto& x : v) x = rng.normal();
  return MultiAspectEmbedding(heads);
}

void BM_Nearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto store = make_store(n, 8, 64);
  const auto q = make_query(8, 64);
  for (auto _ : state) benchmark::DoNotOptimize(store.nearest(0, q.head(0), 30));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Nearest)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_StandardRetrieval(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 8, 64);
  const auto q = make_query(8, 64).concatenated();
  for (auto _ : state) benchmark::DoNotOptimize(retrieve_standard(store, q, 30));
}
BENCHMARK(BM_StandardRetrieval)->Arg(1000)->Arg(10000);

void BM_MragRetrieval(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 8, 64);
  const auto scores = compute_scores(store, 100000, 1);
  const auto q = make_query(8, 64);
  for (auto _ : state) benchmark::DoNotOptimize(retrieve_mrag(store, scores, q, 30, 30));
}
BENCHMARK(BM_MragRetrieval)->Arg(1000)->Arg(10000);

void BM_ComputeScoresExact(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 8, 64);
  for (auto _ : state) benchmark::DoNotOptimize(compute_scores(store));
}
BENCHMARK(BM_ComputeScoresExact)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ComputeScoresSampled(benchmark::State& state) {
  const auto store = make_store(20000, 8, 64);
  const auto pairs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_scores(store, pairs, 7));
}
BENCHMARK(BM_ComputeScoresSampled)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
