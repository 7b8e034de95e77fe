#include <benchmark/benchmark.h>

#include <random>

#include "cie/engine/engine.hpp"
#include "cie/engine/fusion.hpp"
#include "support/generators.hpp"

namespace {

void BM_ApplyFusion(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<cie::DenseHit> sem;
  std::vector<cie::SparseHit> exact;
  for (int i = 0; i < state.range(0); ++i) {
    sem.push_back({"c" + std::to_string(i), u(rng)});
    exact.push_back({"c" + std::to_string(i * 3 % (state.range(0) * 2)), u(rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(cie::apply_fusion(sem, exact, 0.7, 0.3, 3));
}
BENCHMARK(BM_ApplyFusion)->Arg(20)->Arg(200)->Unit(benchmark::kMicrosecond);

struct World {
  cie::Corpus corpus;
  cie::SparseIndex sparse;
  cie::HashingEmbedder embedder{64};
  cie::DenseIndex dense;
  std::unique_ptr<cie::Engine> engine;

  explicit World(std::size_t docs) {
    std::mt19937_64 rng(11);
    corpus = cie::Corpus::build(cie::testing::random_documents(rng, docs, 12), 100);
    sparse = cie::SparseIndex::build(corpus.chunks());
    dense = cie::DenseIndex::build(corpus.chunks(), embedder);
    engine = std::make_unique<cie::Engine>(corpus, sparse, dense, embedder);
  }
};

void BM_Suite(benchmark::State& state) {
  const World w(static_cast<std::size_t>(state.range(0)));
  const std::vector<cie::Action> suite{cie::ExcludeDocs{{"doc1", "doc2"}}, cie::SemanticSearch{"film director born"},
                                       cie::ExactSearch{"river city"}, cie::EntityMatch{"film", "award"}};
  for (auto _ : state) {
    cie::EngineSession session(*w.engine);
    benchmark::DoNotOptimize(session.submit(suite));
  }
}
BENCHMARK(BM_Suite)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);

}  // namespace
