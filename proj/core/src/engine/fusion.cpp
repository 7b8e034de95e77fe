#include "cie/engine/fusion.hpp"

#include <algorithm>
#include <map>

#include "cie/error.hpp"

namespace cie {

namespace {

struct Normalized {
  double raw = 0.0;
  double norm = 0.0;
};

template <typename Hit, typename ScoreFn>
std::map<std::string, Normalized> normalize_top(std::span<const Hit> hits, ScoreFn score_of) {
  std::vector<const Hit*> sorted;
  sorted.reserve(hits.size());
  for (const auto& h : hits) sorted.push_back(&h);
  std::stable_sort(sorted.begin(), sorted.end(), [&](const Hit* a, const Hit* b) {
    if (score_of(*a) != score_of(*b)) return score_of(*a) > score_of(*b);
    return a->chunk_id < b->chunk_id;
  });
  if (sorted.size() > kFusionDepth) sorted.resize(kFusionDepth);

  std::map<std::string, Normalized> out;
  if (sorted.empty()) return out;
  const double hi = score_of(*sorted.front());
  const double lo = score_of(*sorted.back());
  for (const Hit* h : sorted) {
    const double s = score_of(*h);
    const double norm = hi == lo ? 1.0 : (s - lo) / (hi - lo);
    out.emplace(h->chunk_id, Normalized{s, norm});
  }
  return out;
}

}  // namespace

std::vector<ScoredChunk> apply_fusion(std::span<const DenseHit> semantic_hits, std::span<const SparseHit> exact_hits,
                                      double w_s, double w_e, std::size_t n) {
  if (!(w_s >= 0.0) || !(w_e >= 0.0) || !(w_s + w_e > 0.0)) {
    throw InvalidParameter("fusion weights must be non-negative with a positive sum");
  }
  if (n == 0) throw InvalidParameter("result count must be >= 1");

  const auto sem = normalize_top(semantic_hits, [](const DenseHit& h) { return h.cosine_score; });
  const auto exact = normalize_top(exact_hits, [](const SparseHit& h) { return h.bm25_score; });

  std::map<std::string, ScoredChunk> merged;
  for (const auto& [id, s] : sem) {
    auto& c = merged[id];
    c.chunk_id = id;
    c.semantic_score = s.raw;
    c.provenance = c.provenance | Provenance::kSemantic;
  }
  for (const auto& [id, s] : exact) {
    auto& c = merged[id];
    c.chunk_id = id;
    c.exact_score = s.raw;
    c.provenance = c.provenance | Provenance::kExact;
  }

  std::vector<ScoredChunk> out;
  out.reserve(merged.size());
  for (auto& [id, c] : merged) {
    const auto si = sem.find(id);
    const auto ei = exact.find(id);
    const double ns = si == sem.end() ? 0.0 : si->second.norm;
    const double ne = ei == exact.end() ? 0.0 : ei->second.norm;
    c.fused_score = w_s * ns + w_e * ne;
    out.push_back(std::move(c));
  }
  // `merged` is ordered by chunk id, so a stable sort on score alone breaks
  // ties by ascending id.
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredChunk& a, const ScoredChunk& b) { return a.fused_score > b.fused_score; });
  if (out.size() > n) out.resize(n);
  return out;
}

}  // namespace cie
