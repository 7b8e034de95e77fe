#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cie {

/// Which strategies put a chunk into a result list.
enum class Provenance : std::uint8_t {
  kNone = 0,
  kSemantic = 1 << 0,
  kExact = 1 << 1,
  kEntity = 1 << 2,
  kIncluded = 1 << 3,
};

constexpr Provenance operator|(Provenance a, Provenance b) {
  return static_cast<Provenance>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr bool has(Provenance set, Provenance flag) {
  return (static_cast<std::uint8_t>(set) & static_cast<std::uint8_t>(flag)) != 0;
}

std::vector<std::string> provenance_names(Provenance p);
Provenance provenance_from_names(const std::vector<std::string>& names);

/// A retrieved chunk with raw per-strategy scores (cosine, BM25) and the
/// fused score that ranked it.
struct ScoredChunk {
  std::string chunk_id;
  std::string doc_id;
  std::string text;
  std::optional<double> semantic_score;
  std::optional<double> exact_score;
  double fused_score = 0.0;
  Provenance provenance = Provenance::kNone;
  std::vector<std::string> snippets;  // entity_match only

  bool operator==(const ScoredChunk&) const = default;
};

}  // namespace cie
