#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cie/chunk_filter.hpp"
#include "cie/corpus.hpp"
#include "cie/embedding.hpp"

namespace cie {

struct DenseHit {
  std::string chunk_id;
  double cosine_score = 0.0;

  bool operator==(const DenseHit&) const = default;
};

/// Exact (brute-force) cosine index. Vectors are stored normalized, so the
/// cosine is a dot product; it is accumulated in double.
class DenseIndex {
 public:
  static constexpr std::size_t kDefaultBatch = 64;

  DenseIndex() = default;

  /// One vector per chunk, in chunk order. Throws InvalidParameter for an
  /// empty chunk list and EmbeddingError (message reports how many chunks
  /// were embedded before the failure).
  static DenseIndex build(const std::vector<Chunk>& chunks, const EmbeddingProvider& provider,
                          std::size_t batch_size = kDefaultBatch);

  /// Reads `<dir>/index.bin`. Throws IndexFormatError when the stored
  /// provider id or dimension differs from `provider`.
  static DenseIndex load(const std::filesystem::path& dir, const EmbeddingProvider& provider);
  void save(const std::filesystem::path& dir) const;

  const std::string& provider_id() const noexcept { return provider_id_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return chunk_ids_.size(); }
  const std::vector<std::string>& chunk_ids() const noexcept { return chunk_ids_; }

  /// Stored vector for the i-th chunk.
  std::span<const float> vector(std::size_t i) const;

  /// Exact top-k by cosine; ties by ascending chunk id.
  std::vector<DenseHit> search(const EmbeddingVector& query, std::size_t k,
                               const ChunkFilter& filter = {}) const;

  /// Embeds the query with `provider` and searches. Throws EmptyQuery,
  /// InvalidParameter (k == 0), EmbeddingError.
  std::vector<DenseHit> semantic_search(const EmbeddingProvider& provider, const std::string& query,
                                        std::size_t k, const ChunkFilter& filter = {}) const;

 private:
  std::string provider_id_;
  std::size_t dim_ = 0;
  std::vector<std::string> chunk_ids_;
  std::vector<float> data_;  // row-major, size() * dim_
};

}  // namespace cie
