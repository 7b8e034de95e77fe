#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace cie {

/// Per-episode retrieval configuration mutated by the context-shaping and
/// fusion primitives.
struct SessionState {
  static constexpr double kDefaultSemanticWeight = 0.7;
  static constexpr double kDefaultExactWeight = 0.3;
  static constexpr std::size_t kDefaultScale = 3;

  double w_s = kDefaultSemanticWeight;
  double w_e = kDefaultExactWeight;
  std::size_t scale_n = kDefaultScale;
  std::vector<std::string> included;  // insertion order, no duplicates
  std::set<std::string> excluded;

  bool operator==(const SessionState&) const = default;

  /// Most recent action wins: including removes from excluded and vice versa.
  void include(const std::string& doc_id);
  void exclude(const std::string& doc_id);
};

}  // namespace cie
