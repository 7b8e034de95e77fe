#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cie {

struct SemanticSearch {
  std::string query;
  bool operator==(const SemanticSearch&) const = default;
};

struct ExactSearch {
  std::string keywords;
  bool operator==(const ExactSearch&) const = default;
};

struct WeightedFusion {
  double w_s = 0.0;
  double w_e = 0.0;
  bool operator==(const WeightedFusion&) const = default;
};

/// `query` ranks the anchored chunks and their snippets; empty means rank by
/// the entity itself.
struct EntityMatch {
  std::string entity;
  std::string query;
  bool operator==(const EntityMatch&) const = default;
};

struct IncludeDocs {
  std::vector<std::string> doc_ids;
  bool operator==(const IncludeDocs&) const = default;
};

struct ExcludeDocs {
  std::vector<std::string> doc_ids;
  bool operator==(const ExcludeDocs&) const = default;
};

struct AdjustScale {
  std::int64_t n = 0;
  bool operator==(const AdjustScale&) const = default;
};

struct Answer {
  std::string text;
  bool operator==(const Answer&) const = default;
};

using Action = std::variant<SemanticSearch, ExactSearch, WeightedFusion, EntityMatch, IncludeDocs, ExcludeDocs,
                            AdjustScale, Answer>;

/// Tool name for a primitive ("semantic_search", ...); "answer" for Answer.
std::string_view action_name(const Action& a);

/// The seven tool names, in schema order.
const std::vector<std::string_view>& primitive_names();

bool is_retrieval(const Action& a) noexcept;
bool is_state_mutation(const Action& a) noexcept;
inline bool is_answer(const Action& a) noexcept { return std::holds_alternative<Answer>(a); }

/// Tool-call arguments object for a primitive (Answer yields {"text": ...}).
nlohmann::ordered_json action_arguments(const Action& a);

/// Compact human-readable form, e.g. semantic_search(query="...").
std::string describe(const Action& a);

}  // namespace cie
