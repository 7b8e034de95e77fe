#include "cie/engine/action.hpp"

#include <algorithm>
#include <sstream>

#include "cie/engine/scored_chunk.hpp"
#include "cie/engine/session.hpp"

namespace cie {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view action_name(const Action& a) {
  return std::visit(overloaded{
                        [](const SemanticSearch&) { return std::string_view("semantic_search"); },
                        [](const ExactSearch&) { return std::string_view("exact_search"); },
                        [](const WeightedFusion&) { return std::string_view("weighted_fusion"); },
                        [](const EntityMatch&) { return std::string_view("entity_match"); },
                        [](const IncludeDocs&) { return std::string_view("include_docs"); },
                        [](const ExcludeDocs&) { return std::string_view("exclude_docs"); },
                        [](const AdjustScale&) { return std::string_view("adjust_scale"); },
                        [](const Answer&) { return std::string_view("answer"); },
                    },
                    a);
}

const std::vector<std::string_view>& primitive_names() {
  static const std::vector<std::string_view> kNames = {
      "semantic_search", "exact_search", "weighted_fusion", "entity_match",
      "include_docs",    "exclude_docs", "adjust_scale"};
  return kNames;
}

bool is_retrieval(const Action& a) noexcept {
  return std::holds_alternative<SemanticSearch>(a) || std::holds_alternative<ExactSearch>(a) ||
         std::holds_alternative<EntityMatch>(a);
}

bool is_state_mutation(const Action& a) noexcept {
  return std::holds_alternative<WeightedFusion>(a) || std::holds_alternative<IncludeDocs>(a) ||
         std::holds_alternative<ExcludeDocs>(a) || std::holds_alternative<AdjustScale>(a);
}

nlohmann::ordered_json action_arguments(const Action& a) {
  using oj = nlohmann::ordered_json;
  return std::visit(overloaded{
                        [](const SemanticSearch& s) { return oj{{"query", s.query}}; },
                        [](const ExactSearch& s) { return oj{{"keywords", s.keywords}}; },
                        [](const WeightedFusion& w) { return oj{{"w_s", w.w_s}, {"w_e", w.w_e}}; },
                        [](const EntityMatch& e) {
                          oj j{{"entity", e.entity}};
                          if (!e.query.empty()) j["query"] = e.query;
                          return j;
                        },
                        [](const IncludeDocs& d) { return oj{{"doc_ids", d.doc_ids}}; },
                        [](const ExcludeDocs& d) { return oj{{"doc_ids", d.doc_ids}}; },
                        [](const AdjustScale& s) { return oj{{"n", s.n}}; },
                        [](const Answer& s) { return oj{{"text", s.text}}; },
                    },
                    a);
}

std::string describe(const Action& a) {
  std::ostringstream out;
  out << action_name(a) << '(';
  bool first = true;
  const auto args = action_arguments(a);
  for (const auto& [k, v] : args.items()) {
    if (!first) out << ", ";
    first = false;
    out << k << '=' << v.dump();
  }
  out << ')';
  return out.str();
}

void SessionState::include(const std::string& doc_id) {
  excluded.erase(doc_id);
  if (std::find(included.begin(), included.end(), doc_id) == included.end()) included.push_back(doc_id);
}

void SessionState::exclude(const std::string& doc_id) {
  std::erase(included, doc_id);
  excluded.insert(doc_id);
}

std::vector<std::string> provenance_names(Provenance p) {
  std::vector<std::string> out;
  if (has(p, Provenance::kSemantic)) out.emplace_back("semantic");
  if (has(p, Provenance::kExact)) out.emplace_back("exact");
  if (has(p, Provenance::kEntity)) out.emplace_back("entity");
  if (has(p, Provenance::kIncluded)) out.emplace_back("included");
  return out;
}

Provenance provenance_from_names(const std::vector<std::string>& names) {
  Provenance p = Provenance::kNone;
  for (const auto& n : names) {
    if (n == "semantic") p = p | Provenance::kSemantic;
    else if (n == "exact") p = p | Provenance::kExact;
    else if (n == "entity") p = p | Provenance::kEntity;
    else if (n == "included") p = p | Provenance::kIncluded;
  }
  return p;
}

}  // namespace cie
