#pragma once

#include <cmath>
#include <cstddef>

namespace cie::bm25 {

inline constexpr double kK1 = 1.2;
inline constexpr double kB = 0.75;

/// +1-smoothed idf: ln((N - n + 0.5) / (n + 0.5) + 1). Always positive.
inline double idf(std::size_t num_docs, std::size_t doc_freq) {
  const double n = static_cast<double>(doc_freq);
  const double big_n = static_cast<double>(num_docs);
  return std::log((big_n - n + 0.5) / (n + 0.5) + 1.0);
}

inline double tf_weight(std::size_t tf, std::size_t doc_len, double avg_doc_len) {
  const double f = static_cast<double>(tf);
  const double norm = avg_doc_len > 0.0 ? static_cast<double>(doc_len) / avg_doc_len : 1.0;
  return (f * (kK1 + 1.0)) / (f + kK1 * (1.0 - kB + kB * norm));
}

}  // namespace cie::bm25
