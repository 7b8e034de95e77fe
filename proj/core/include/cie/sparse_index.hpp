#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cie/chunk_filter.hpp"
#include "cie/corpus.hpp"

namespace cie {

using Token = std::string;

/// Lowercased alphanumeric runs. Bytes >= 0x80 count as alphanumeric so
/// UTF-8 words stay whole. No stemming or stopwords.
std::vector<Token> tokenize(std::string_view text);

struct SparseHit {
  std::string chunk_id;
  double bm25_score = 0.0;

  bool operator==(const SparseHit&) const = default;
};

struct EntityHit {
  SparseHit hit;
  std::vector<std::string> snippets;  // at most 3, best first
};

struct Posting {
  std::uint32_t chunk = 0;  // ordinal into chunk_ids
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Plain inverted index over chunk ordinals.
struct InvertedIndex {
  std::vector<std::string> chunk_ids;
  std::unordered_map<Token, std::vector<Posting>> postings;  // ordinal-ascending
  std::vector<std::uint32_t> doc_lengths;                    // tokens per chunk
  double avg_doc_length = 0.0;

  std::size_t num_chunks() const noexcept { return chunk_ids.size(); }
};

/// BM25 index over chunks plus the chunk token streams needed for phrase
/// containment and snippet extraction. Immutable once built; concurrent
/// readers are safe.
class SparseIndex {
 public:
  static constexpr std::size_t kMaxSnippets = 3;
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  SparseIndex() = default;

  /// Throws IndexBuildError on duplicate chunk ids.
  static SparseIndex build(const std::vector<Chunk>& chunks);

  /// Reads `<dir>/index.bin`; chunk texts come from the corpus (must be the
  /// corpus the index was built from).
  static SparseIndex load(const std::filesystem::path& dir, const Corpus& corpus);
  void save(const std::filesystem::path& dir) const;

  const InvertedIndex& inverted() const noexcept { return index_; }
  std::size_t size() const noexcept { return index_.num_chunks(); }

  /// Sum over query tokens of idf * tf weight. Throws NotFound.
  double bm25_score(const std::vector<Token>& query_tokens, const std::string& chunk_id) const;

  /// Top-k chunks containing at least one keyword token. Throws EmptyQuery
  /// and InvalidParameter (k == 0).
  std::vector<SparseHit> exact_search(std::string_view keywords, std::size_t k,
                                      const ChunkFilter& filter = {}) const;

  /// Chunks whose token stream contains the entity's tokens contiguously,
  /// ranked by BM25 of `query` (entity tokens when the query has none).
  std::vector<EntityHit> entity_match(std::string_view entity, std::string_view query,
                                      const ChunkFilter& filter = {},
                                      std::size_t k = kUnbounded) const;

  /// Up to `max` sentences of `chunk_text` ranked by BM25 of the query
  /// against the chunk's sentences treated as a micro-corpus. Ties keep
  /// sentence order.
  static std::vector<std::string> rank_snippets(std::string_view chunk_text,
                                                const std::vector<Token>& query_tokens,
                                                std::size_t max = kMaxSnippets);

 private:
  std::uint32_t ordinal(const std::string& chunk_id) const;
  std::vector<std::pair<double, std::uint32_t>> accumulate(const std::vector<Token>& tokens,
                                                           const ChunkFilter& filter) const;

  InvertedIndex index_;
  std::vector<std::string> texts_;
  std::unordered_map<std::string, std::uint32_t> ordinals_;
};

}  // namespace cie
