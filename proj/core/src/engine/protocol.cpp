#include "cie/engine/protocol.hpp"

#include <cmath>

#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

using json = nlohmann::json;

namespace {

const json& require(const json& args, const char* key) {
  auto it = args.find(key);
  if (it == args.end()) throw ProtocolError(std::string("malformed arguments: missing '") + key + "'");
  return *it;
}

std::string require_string(const json& args, const char* key) {
  const auto& v = require(args, key);
  if (!v.is_string()) throw ProtocolError(std::string("malformed arguments: '") + key + "' must be a string");
  return v.get<std::string>();
}

double require_number(const json& args, const char* key) {
  const auto& v = require(args, key);
  if (!v.is_number()) throw ProtocolError(std::string("malformed arguments: '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<std::string> require_string_list(const json& args, const char* key) {
  const auto& v = require(args, key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ProtocolError(std::string("malformed arguments: '") + key + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ProtocolError(std::string("malformed arguments: '") + key + "' must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::int64_t require_integer(const json& args, const char* key) {
  const auto& v = require(args, key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ProtocolError(std::string("malformed arguments: '") + key + "' must be an integer");
}

ParsedCall parse_block(std::string_view payload) {
  ParseFailure failure;
  failure.raw = std::string(payload);
  json obj;
  try {
    obj = json::parse(payload);
  } catch (const json::parse_error&) {
    failure.reason = "invalid JSON in tool_call";
    return failure;
  }
  if (!obj.is_object()) {
    failure.reason = "tool_call must be a JSON object";
    return failure;
  }
  auto name_it = obj.find("name");
  if (name_it == obj.end() || !name_it->is_string()) {
    failure.reason = "tool_call is missing a string 'name'";
    return failure;
  }
  failure.name = name_it->get<std::string>();
  json args = json::object();
  if (auto it = obj.find("arguments"); it != obj.end()) {
    if (it->is_string()) {
      try {
        args = json::parse(it->get<std::string>());
      } catch (const json::parse_error&) {
        failure.reason = "malformed arguments: not valid JSON";
        return failure;
      }
    } else {
      args = *it;
    }
  }
  try {
    return action_from_call(failure.name, args);
  } catch (const ProtocolError& e) {
    failure.reason = e.what();
    return failure;
  } catch (const json::exception& e) {
    failure.reason = std::string("malformed arguments: ") + e.what();
    return failure;
  }
}

}  // namespace

Action action_from_call(std::string_view name, const json& args) {
  bool known = false;
  for (auto n : primitive_names()) known = known || n == name;
  if (!known) throw ProtocolError("unknown tool");
  if (!args.is_object()) throw ProtocolError("malformed arguments: expected an object");

  if (name == "semantic_search") return SemanticSearch{require_string(args, "query")};
  if (name == "exact_search") {
    const auto& v = require(args, "keywords");
    if (v.is_array()) {
      std::string joined;
      for (const auto& k : require_string_list(args, "keywords")) {
        if (!joined.empty()) joined.push_back(' ');
        joined += k;
      }
      return ExactSearch{joined};
    }
    return ExactSearch{require_string(args, "keywords")};
  }
  if (name == "weighted_fusion") return WeightedFusion{require_number(args, "w_s"), require_number(args, "w_e")};
  if (name == "entity_match") {
    EntityMatch e{require_string(args, "entity"), {}};
    if (args.contains("query")) e.query = require_string(args, "query");
    return e;
  }
  if (name == "include_docs") return IncludeDocs{require_string_list(args, "doc_ids")};
  if (name == "exclude_docs") return ExcludeDocs{require_string_list(args, "doc_ids")};
  return AdjustScale{require_integer(args, "n")};
}

std::vector<Action> ParsedCalls::actions() const {
  std::vector<Action> out;
  for (const auto& c : calls) {
    if (const auto* a = std::get_if<Action>(&c)) out.push_back(*a);
  }
  return out;
}

std::vector<ParseFailure> ParsedCalls::failures() const {
  std::vector<ParseFailure> out;
  for (const auto& c : calls) {
    if (const auto* f = std::get_if<ParseFailure>(&c)) out.push_back(*f);
  }
  return out;
}

ParsedCalls parse_tool_calls(std::string_view text) {
  ParsedCalls out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find(kToolCallOpen, pos);
    if (open == std::string_view::npos) break;
    const auto body = open + kToolCallOpen.size();
    const auto close = text.find(kToolCallClose, body);
    if (close == std::string_view::npos) {
      out.calls.push_back(ParseFailure{"unterminated tool_call", {}, std::string(text.substr(body))});
      break;
    }
    out.calls.push_back(parse_block(text::trim(text.substr(body, close - body))));
    pos = close + kToolCallClose.size();
  }
  return out;
}

std::string render_tool_call(const Action& action) {
  nlohmann::ordered_json j{{"name", std::string(action_name(action))}, {"arguments", action_arguments(action)}};
  std::string out(kToolCallOpen);
  out += '\n';
  out += text::guard_closing_tags(j.dump(-1, ' ', false, json::error_handler_t::replace));
  out += '\n';
  out += kToolCallClose;
  return out;
}

std::string render_tool_calls(std::span<const Action> actions) {
  std::string out;
  for (const auto& a : actions) {
    if (!out.empty()) out += '\n';
    if (const auto* ans = std::get_if<Answer>(&a)) {
      out += ans->text;
    } else {
      out += render_tool_call(a);
    }
  }
  return out;
}

std::string strip_tool_calls(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find(kToolCallOpen, pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const auto close = text.find(kToolCallClose, open + kToolCallOpen.size());
    if (close == std::string_view::npos) break;
    pos = close + kToolCallClose.size();
  }
  return out;
}

bool contains_tool_call(std::string_view text) { return text.find(kToolCallOpen) != std::string_view::npos; }

}  // namespace cie
