#include "cie/engine/tool_response.hpp"

#include <cmath>

#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

using oj = nlohmann::ordered_json;

namespace {

constexpr std::string_view kOpen = "<tool_response>";
constexpr std::string_view kClose = "</tool_response>";

BlockStatus status_from(const std::string& s) {
  if (s == "ok") return BlockStatus::kOk;
  if (s == "warning") return BlockStatus::kWarning;
  if (s == "error") return BlockStatus::kError;
  throw ProtocolError("unknown block status '" + s + "'");
}

oj chunk_json(const ScoredChunk& c, std::size_t rank) {
  oj scores = oj::object();
  if (c.semantic_score) scores["semantic"] = round4(*c.semantic_score);
  if (c.exact_score) scores["exact"] = round4(*c.exact_score);
  scores["fused"] = round4(c.fused_score);
  oj j{{"rank", rank}, {"chunk_id", c.chunk_id}, {"doc_id", c.doc_id}, {"scores", scores},
       {"sources", provenance_names(c.provenance)}, {"text", c.text}};
  if (!c.snippets.empty()) j["snippets"] = c.snippets;
  return j;
}

ScoredChunk chunk_from(const oj& j) {
  ScoredChunk c;
  c.chunk_id = j.at("chunk_id").get<std::string>();
  c.doc_id = j.at("doc_id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  const auto& scores = j.at("scores");
  if (scores.contains("semantic")) c.semantic_score = scores.at("semantic").get<double>();
  if (scores.contains("exact")) c.exact_score = scores.at("exact").get<double>();
  c.fused_score = scores.at("fused").get<double>();
  c.provenance = provenance_from_names(j.at("sources").get<std::vector<std::string>>());
  if (j.contains("snippets")) c.snippets = j.at("snippets").get<std::vector<std::string>>();
  return c;
}

}  // namespace

std::string_view to_string(BlockStatus s) {
  switch (s) {
    case BlockStatus::kOk: return "ok";
    case BlockStatus::kWarning: return "warning";
    case BlockStatus::kError: return "error";
  }
  return "error";
}

SessionSummary SessionSummary::of(const SessionState& s) {
  return {s.w_s, s.w_e, s.scale_n, s.included, std::vector<std::string>(s.excluded.begin(), s.excluded.end())};
}

bool ToolResponse::has_errors() const {
  for (const auto& b : blocks) {
    if (b.status == BlockStatus::kError) return true;
  }
  return false;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

oj tool_response_json(const ToolResponse& resp) {
  oj blocks = oj::array();
  for (const auto& b : resp.blocks) {
    oj j{{"tool", b.tool}, {"arguments", b.arguments}, {"status", std::string(to_string(b.status))}};
    if (!b.message.empty()) j["message"] = b.message;
    if (b.retrieval) {
      oj results = oj::array();
      for (std::size_t i = 0; i < b.results.size(); ++i) results.push_back(chunk_json(b.results[i], i + 1));
      j["results"] = std::move(results);
      if (b.results.empty()) j["note"] = "no results";
    }
    blocks.push_back(std::move(j));
  }
  oj session{{"w_s", round4(resp.session.w_s)},
             {"w_e", round4(resp.session.w_e)},
             {"scale", resp.session.scale_n},
             {"included", resp.session.included},
             {"excluded", resp.session.excluded}};
  return oj{{"actions", std::move(blocks)}, {"session", std::move(session)}};
}

std::string render_tool_response(const ToolResponse& resp) {
  std::string out(kOpen);
  out += '\n';
  out += text::guard_closing_tags(tool_response_json(resp).dump(2, ' ', false, nlohmann::json::error_handler_t::replace));
  out += '\n';
  out += kClose;
  return out;
}

ToolResponse parse_tool_response(std::string_view rendered) {
  auto body = text::trim(rendered);
  if (!body.starts_with(kOpen) || !body.ends_with(kClose)) throw ProtocolError("not a tool_response block");
  body.remove_prefix(kOpen.size());
  body.remove_suffix(kClose.size());
  try {
    const auto doc = oj::parse(body);
    ToolResponse resp;
    for (const auto& j : doc.at("actions")) {
      ActionBlock b;
      b.tool = j.at("tool").get<std::string>();
      b.arguments = j.at("arguments");
      b.status = status_from(j.at("status").get<std::string>());
      b.message = j.value("message", std::string());
      if (j.contains("results")) {
        b.retrieval = true;
        for (const auto& r : j.at("results")) b.results.push_back(chunk_from(r));
      }
      resp.blocks.push_back(std::move(b));
    }
    const auto& s = doc.at("session");
    resp.session.w_s = s.at("w_s").get<double>();
    resp.session.w_e = s.at("w_e").get<double>();
    resp.session.scale_n = s.at("scale").get<std::size_t>();
    resp.session.included = s.at("included").get<std::vector<std::string>>();
    resp.session.excluded = s.at("excluded").get<std::vector<std::string>>();
    return resp;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed tool_response: ") + e.what());
  }
}

}  // namespace cie
