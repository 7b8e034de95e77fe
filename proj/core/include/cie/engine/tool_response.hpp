#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cie/engine/scored_chunk.hpp"
#include "cie/engine/session.hpp"

namespace cie {

enum class BlockStatus { kOk, kWarning, kError };

std::string_view to_string(BlockStatus s);

/// Outcome of one action (or one rejected tool call) inside a suite.
struct ActionBlock {
  std::string tool;                     // primitive name, or the raw name of a rejected call
  nlohmann::ordered_json arguments = nlohmann::ordered_json::object();
  BlockStatus status = BlockStatus::kOk;
  std::string message;                  // acknowledgment, warning or error text
  bool retrieval = false;               // carries a result list
  std::vector<ScoredChunk> results;

  bool operator==(const ActionBlock&) const = default;
};

struct SessionSummary {
  double w_s = 0.0;
  double w_e = 0.0;
  std::size_t scale_n = 0;
  std::vector<std::string> included;
  std::vector<std::string> excluded;  // sorted

  static SessionSummary of(const SessionState& s);
  bool operator==(const SessionSummary&) const = default;
};

/// Consolidated response to one suite of tool calls.
struct ToolResponse {
  std::vector<ActionBlock> blocks;
  SessionSummary session;

  bool has_errors() const;
  bool operator==(const ToolResponse&) const = default;
};

/// Rounds to 4 decimals, half away from zero.
double round4(double x);

/// {"actions": [...], "session": {...}} with scores rounded to 4 decimals.
nlohmann::ordered_json tool_response_json(const ToolResponse& resp);

/// `<tool_response>` + pretty JSON + `</tool_response>`. Scores are rounded
/// to 4 decimals; retrieval blocks without results carry a "no results" note.
std::string render_tool_response(const ToolResponse& resp);

/// Inverse of render_tool_response. Throws ProtocolError on malformed input.
ToolResponse parse_tool_response(std::string_view rendered);

}  // namespace cie
