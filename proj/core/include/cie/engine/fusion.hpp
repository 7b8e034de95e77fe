#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cie/dense_index.hpp"
#include "cie/engine/scored_chunk.hpp"
#include "cie/sparse_index.hpp"

namespace cie {

inline constexpr std::size_t kFusionDepth = 20;

/// Weighted-sum fusion of a semantic and an exact result list.
///
/// Each list is cut to its top kFusionDepth and min-max normalized on its
/// own (a list whose scores are all equal normalizes to 1.0). A chunk absent
/// from one list gets 0 for that strategy. fused = w_s * sem + w_e * exact.
/// Returns the top `n` by fused score, ties by ascending chunk id. doc_id and
/// text are left empty for the caller to fill.
///
/// Throws InvalidParameter unless w_s, w_e >= 0, w_s + w_e > 0 and n >= 1.
std::vector<ScoredChunk> apply_fusion(std::span<const DenseHit> semantic_hits, std::span<const SparseHit> exact_hits,
                                      double w_s, double w_e, std::size_t n);

}  // namespace cie
