#pragma once

#include <string>
#include <unordered_set>

namespace cie {

/// Candidate restriction passed to the indexes: everything, an allow-list, or
/// a deny-list of chunk ids. The deny form keeps "universe minus excluded"
/// cheap on large corpora.
class ChunkFilter {
 public:
  enum class Mode { kAll, kOnly, kExcept };

  ChunkFilter() = default;

  static ChunkFilter all() { return {}; }
  static ChunkFilter only(std::unordered_set<std::string> ids) {
    return ChunkFilter(Mode::kOnly, std::move(ids));
  }
  static ChunkFilter except(std::unordered_set<std::string> ids) {
    if (ids.empty()) return {};
    return ChunkFilter(Mode::kExcept, std::move(ids));
  }

  bool allows(const std::string& chunk_id) const {
    switch (mode_) {
      case Mode::kAll: return true;
      case Mode::kOnly: return ids_.contains(chunk_id);
      case Mode::kExcept: return !ids_.contains(chunk_id);
    }
    return false;
  }

  Mode mode() const noexcept { return mode_; }
  const std::unordered_set<std::string>& ids() const noexcept { return ids_; }

 private:
  ChunkFilter(Mode m, std::unordered_set<std::string> ids) : mode_(m), ids_(std::move(ids)) {}

  Mode mode_ = Mode::kAll;
  std::unordered_set<std::string> ids_;
};

}  // namespace cie
