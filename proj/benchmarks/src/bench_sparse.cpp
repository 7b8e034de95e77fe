#include <benchmark/benchmark.h>

#include <random>

#include "cie/sparse_index.hpp"
#include "support/generators.hpp"

namespace {

std::vector<cie::Chunk> corpus(std::size_t n) {
  std::mt19937_64 rng(42);
  return cie::testing::random_chunks(rng, n, 20, 120);
}

void BM_SparseBuild(benchmark::State& state) {
  const auto chunks = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cie::SparseIndex::build(chunks));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SparseBuild)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ExactSearch(benchmark::State& state) {
  const auto index = cie::SparseIndex::build(corpus(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(index.exact_search("film director born river", 10));
}
BENCHMARK(BM_ExactSearch)->Arg(1000)->Arg(10000)->Arg(50000)->Unit(benchmark::kMicrosecond);

void BM_EntityMatch(benchmark::State& state) {
  const auto index = cie::SparseIndex::build(corpus(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(index.entity_match("film director", "born city", {}, 10));
}
BENCHMARK(BM_EntityMatch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
