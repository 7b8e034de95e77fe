#pragma once

#include <filesystem>
#include <memory>

#include "cie/corpus.hpp"
#include "cie/dense_index.hpp"
#include "cie/embedding.hpp"
#include "cie/engine/engine.hpp"
#include "cie/sparse_index.hpp"

namespace cie {

/// Index directory layout: the corpus store at the top level, the sparse
/// index under `sparse/` and the dense index under `dense/`.
struct IndexPaths {
  std::filesystem::path root;

  std::filesystem::path sparse() const { return root / "sparse"; }
  std::filesystem::path dense() const { return root / "dense"; }
};

struct BuildSummary {
  std::size_t chunks = 0;
  std::size_t vocabulary = 0;
  std::string provider_id;
  std::size_t dimension = 0;
};

/// Builds and saves both indexes for an ingested corpus directory.
BuildSummary build_indexes(const std::filesystem::path& index_dir, const EmbeddingProvider& provider);

/// Everything one process needs to serve retrieval over an index directory.
/// Pinned in memory because the engine holds references to its members.
class Workspace {
 public:
  /// Throws IndexFormatError / NotFound when the directory is incomplete
  /// or was built with another embedding provider.
  static std::unique_ptr<Workspace> open(const std::filesystem::path& index_dir,
                                         std::unique_ptr<EmbeddingProvider> provider, EngineOptions options = {});

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const Corpus& corpus() const noexcept { return corpus_; }
  const SparseIndex& sparse() const noexcept { return sparse_; }
  const DenseIndex& dense() const noexcept { return dense_; }
  const EmbeddingProvider& provider() const noexcept { return *provider_; }
  const Engine& engine() const noexcept { return *engine_; }

 private:
  Workspace() = default;

  Corpus corpus_;
  SparseIndex sparse_;
  std::unique_ptr<EmbeddingProvider> provider_;
  DenseIndex dense_;
  std::unique_ptr<Engine> engine_;
};

}  // namespace cie
