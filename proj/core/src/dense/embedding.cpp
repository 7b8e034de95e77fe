#include "cie/embedding.hpp"

#include <httplib.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>

#include "../http_util.hpp"
#include "cie/error.hpp"
#include "cie/hash.hpp"
#include "cie/sparse_index.hpp"
#include "cie/text.hpp"

namespace cie {

bool l2_normalize(std::vector<float>& v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  if (sq == 0.0) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) * inv);
  return true;
}

EmbeddingVector embed(const EmbeddingProvider& provider, const std::string& text) {
  if (text::trim(text).empty()) throw InvalidParameter("cannot embed blank text");
  auto batch = provider.embed_batch(std::span<const std::string>(&text, 1));
  if (batch.size() != 1) throw EmbeddingError("provider returned " + std::to_string(batch.size()) + " vectors for 1 text", false);
  EmbeddingVector v{std::move(batch.front()), false};
  if (v.values.size() != provider.dimension()) {
    throw EmbeddingError("provider returned dimension " + std::to_string(v.values.size()) + ", expected " +
                             std::to_string(provider.dimension()),
                         false);
  }
  v.unit_norm = l2_normalize(v.values);
  return v;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dim_(dimension) {
  if (dim_ == 0) throw InvalidParameter("embedding dimension must be >= 1");
}

std::string HashingEmbedder::id() const { return "hash-" + std::to_string(dim_); }

std::vector<std::vector<float>> HashingEmbedder::embed_batch(std::span<const std::string> texts) const {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<float> v(dim_, 0.0f);
    for (const auto& tok : tokenize(t)) v[fnv1a64(tok) % dim_] += 1.0f;
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEmbeddingConfig config) : config_(std::move(config)) {
  detail::split_url(config_.url);  // validate early
  if (config_.dimension == 0) throw ConfigError("embedding dimension must be >= 1");
}

std::string HttpEmbeddingProvider::id() const { return "http:" + config_.model; }

std::vector<std::vector<float>> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const auto url = detail::split_url(config_.url);
  nlohmann::json body{{"model", config_.model}, {"input", texts}};
  const auto payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(200) * (1 << (attempt - 1)));
    httplib::Client client(url.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    auto res = client.Post(url.path.empty() ? "/" : url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw EmbeddingError("embedding endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body, false);
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      const auto& data = j.at("data");
      if (data.size() != texts.size()) throw EmbeddingError("embedding endpoint returned wrong vector count", false);
      std::vector<std::vector<float>> out(texts.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& item = data[i];
        const auto idx = item.value("index", i);
        if (idx >= out.size()) throw EmbeddingError("embedding endpoint returned bad index", false);
        out[idx] = item.at("embedding").get<std::vector<float>>();
        if (out[idx].size() != config_.dimension) {
          throw EmbeddingError("embedding endpoint returned dimension " + std::to_string(out[idx].size()), false);
        }
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw EmbeddingError(std::string("malformed embedding response: ") + e.what(), false);
    }
  }
  throw EmbeddingError("embedding request failed after retries: " + last_error, true);
}

}  // namespace cie
