#include "cie/dense_index.hpp"

#include <algorithm>
#include <fstream>

#include "../binary_io.hpp"
#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'C', 'I', 'E', 'D', 'N', 'S', 'E', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

}  // namespace

DenseIndex DenseIndex::build(const std::vector<Chunk>& chunks, const EmbeddingProvider& provider,
                             std::size_t batch_size) {
  if (chunks.empty()) throw InvalidParameter("cannot build a dense index over zero chunks");
  if (batch_size == 0) batch_size = kDefaultBatch;
  DenseIndex idx;
  idx.provider_id_ = provider.id();
  idx.dim_ = provider.dimension();
  idx.chunk_ids_.reserve(chunks.size());
  idx.data_.reserve(chunks.size() * idx.dim_);

  std::vector<std::string> batch;
  for (std::size_t start = 0; start < chunks.size(); start += batch_size) {
    const auto end = std::min(chunks.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(chunks[i].text);
    std::vector<std::vector<float>> vecs;
    try {
      vecs = provider.embed_batch(batch);
      if (vecs.size() != batch.size()) throw EmbeddingError("provider returned wrong vector count", false);
    } catch (const EmbeddingError& e) {
      throw EmbeddingError("dense index build stopped after " + std::to_string(start) + " of " +
                               std::to_string(chunks.size()) + " chunks: " + e.what(),
                           e.retryable());
    }
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      auto& v = vecs[i];
      if (v.size() != idx.dim_) {
        throw EmbeddingError("dense index build stopped after " + std::to_string(start) + " of " +
                                 std::to_string(chunks.size()) + " chunks: dimension mismatch",
                             false);
      }
      l2_normalize(v);
      idx.chunk_ids_.push_back(chunks[start + i].chunk_id);
      idx.data_.insert(idx.data_.end(), v.begin(), v.end());
    }
  }
  return idx;
}

void DenseIndex::save(const fs::path& dir) const {
  fs::create_directories(dir);
  std::ofstream out(dir / "index.bin", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "index.bin").string());
  out.write(kMagic, sizeof kMagic);
  detail::put(out, kFormatVersion);
  detail::put_string(out, provider_id_);
  detail::put<std::uint64_t>(out, dim_);
  detail::put<std::uint64_t>(out, chunk_ids_.size());
  for (const auto& id : chunk_ids_) detail::put_string(out, id);
  out.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(float)));
}

DenseIndex DenseIndex::load(const fs::path& dir, const EmbeddingProvider& provider) {
  std::ifstream in(dir / "index.bin", std::ios::binary);
  if (!in) throw IndexFormatError("missing dense index in " + dir.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 8, kMagic)) throw IndexFormatError("not a dense index file");
  if (detail::get<std::uint32_t>(in) != kFormatVersion) throw IndexFormatError("unsupported dense index version");
  DenseIndex idx;
  idx.provider_id_ = detail::get_string(in);
  idx.dim_ = detail::get<std::uint64_t>(in);
  if (idx.provider_id_ != provider.id() || idx.dim_ != provider.dimension()) {
    throw IndexFormatError("dense index was built with provider '" + idx.provider_id_ + "' (dim " +
                           std::to_string(idx.dim_) + "), configured provider is '" + provider.id() + "' (dim " +
                           std::to_string(provider.dimension()) + "); rebuild the index");
  }
  const auto n = detail::get<std::uint64_t>(in);
  idx.chunk_ids_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) idx.chunk_ids_.push_back(detail::get_string(in));
  idx.data_.resize(n * idx.dim_);
  in.read(reinterpret_cast<char*>(idx.data_.data()), static_cast<std::streamsize>(idx.data_.size() * sizeof(float)));
  if (!in) throw IndexFormatError("truncated dense index");
  return idx;
}

std::span<const float> DenseIndex::vector(std::size_t i) const {
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::vector<DenseHit> DenseIndex::search(const EmbeddingVector& query, std::size_t k, const ChunkFilter& filter) const {
  if (k == 0) throw InvalidParameter("k must be >= 1");
  if (query.values.size() != dim_) throw EmbeddingError("query dimension does not match index", false);
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(chunk_ids_.size());
  for (std::size_t i = 0; i < chunk_ids_.size(); ++i) {
    if (!filter.allows(chunk_ids_[i])) continue;
    const float* row = data_.data() + i * dim_;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += static_cast<double>(row[d]) * static_cast<double>(query.values[d]);
    scored.emplace_back(dot, static_cast<std::uint32_t>(i));
  }
  auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return chunk_ids_[a.second] < chunk_ids_[b.second];
  };
  const auto take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  std::vector<DenseHit> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({chunk_ids_[scored[i].second], scored[i].first});
  return out;
}

std::vector<DenseHit> DenseIndex::semantic_search(const EmbeddingProvider& provider, const std::string& query,
                                                  std::size_t k, const ChunkFilter& filter) const {
  if (text::trim(query).empty()) throw EmptyQuery();
  if (k == 0) throw InvalidParameter("k must be >= 1");
  return search(embed(provider, query), k, filter);
}

}  // namespace cie
