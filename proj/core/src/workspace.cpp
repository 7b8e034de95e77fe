#include "cie/workspace.hpp"

#include "cie/error.hpp"

namespace cie {

BuildSummary build_indexes(const std::filesystem::path& index_dir, const EmbeddingProvider& provider) {
  const IndexPaths paths{index_dir};
  const auto corpus = Corpus::load(paths.root);
  const auto sparse = SparseIndex::build(corpus.chunks());
  sparse.save(paths.sparse());
  const auto dense = DenseIndex::build(corpus.chunks(), provider);
  dense.save(paths.dense());
  return {corpus.chunks().size(), sparse.inverted().postings.size(), dense.provider_id(), dense.dimension()};
}

std::unique_ptr<Workspace> Workspace::open(const std::filesystem::path& index_dir,
                                           std::unique_ptr<EmbeddingProvider> provider, EngineOptions options) {
  if (!provider) throw InvalidParameter("an embedding provider is required");
  const IndexPaths paths{index_dir};
  std::unique_ptr<Workspace> w(new Workspace());
  w->corpus_ = Corpus::load(paths.root);
  w->sparse_ = SparseIndex::load(paths.sparse(), w->corpus_);
  w->provider_ = std::move(provider);
  w->dense_ = DenseIndex::load(paths.dense(), *w->provider_);
  w->engine_ = std::make_unique<Engine>(w->corpus_, w->sparse_, w->dense_, *w->provider_, std::move(options));
  return w;
}

}  // namespace cie
