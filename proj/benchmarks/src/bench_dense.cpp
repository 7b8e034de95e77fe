#include <benchmark/benchmark.h>

#include <random>

#include "cie/dense_index.hpp"
#include "cie/embedding.hpp"
#include "support/generators.hpp"

namespace {

void BM_DenseBuild(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto chunks = cie::testing::random_chunks(rng, static_cast<std::size_t>(state.range(0)), 20, 120);
  const cie::HashingEmbedder embedder(64);
  for (auto _ : state) benchmark::DoNotOptimize(cie::DenseIndex::build(chunks, embedder));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DenseBuild)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SemanticSearch(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto chunks = cie::testing::random_chunks(rng, static_cast<std::size_t>(state.range(0)), 20, 120);
  const cie::HashingEmbedder embedder(static_cast<std::size_t>(state.range(1)));
  const auto index = cie::DenseIndex::build(chunks, embedder);
  const auto query = cie::embed(embedder, "film director born in the river city");
  for (auto _ : state) benchmark::DoNotOptimize(index.search(query, 10));
}
BENCHMARK(BM_SemanticSearch)->Args({1000, 64})->Args({10000, 64})->Args({10000, 768})->Unit(benchmark::kMicrosecond);

}  // namespace
