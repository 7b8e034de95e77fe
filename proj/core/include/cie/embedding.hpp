#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cie {

struct EmbeddingVector {
  std::vector<float> values;
  bool unit_norm = false;

  bool operator==(const EmbeddingVector&) const = default;
};

/// Source of raw embeddings. Implementations must be deterministic per text
/// and safe to call from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// Stable identity recorded in index headers (e.g. "hash-64", "http:e5-base-v2").
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;

  /// One vector per text, same order. Throws EmbeddingError.
  virtual std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) const = 0;
};

/// L2-normalizes in place. Returns false (and leaves the vector untouched)
/// when the norm is zero.
bool l2_normalize(std::vector<float>& v);

/// Provider output for one text, L2-normalized. Throws InvalidParameter on
/// blank text and EmbeddingError on provider failure or dimension mismatch.
/// A text with no tokens embeds to the zero vector with unit_norm == false.
EmbeddingVector embed(const EmbeddingProvider& provider, const std::string& text);

/// Test-grade provider: every token is hashed (FNV-1a 64) into one of
/// `dimension` buckets and counted. Normalization happens in embed().
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 64);

  std::string id() const override;
  std::size_t dimension() const override { return dim_; }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
};

struct HttpEmbeddingConfig {
  std::string url;        // full endpoint, e.g. http://localhost:8080/v1/embeddings
  std::string model;
  std::size_t dimension = 768;
  std::string api_key;    // empty: no Authorization header
  std::chrono::seconds timeout{60};
  int max_retries = 3;
};

/// OpenAI-style embeddings endpoint: POST {"model", "input": [texts]} and
/// read `data[i].embedding`. Transport errors and 5xx/429 are retried with
/// exponential backoff and reported as retryable.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpEmbeddingConfig config);

  std::string id() const override;
  std::size_t dimension() const override { return config_.dimension; }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) const override;

 private:
  HttpEmbeddingConfig config_;
};

}  // namespace cie
