#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cie/engine/action.hpp"

namespace cie {

inline constexpr std::string_view kToolCallOpen = "<tool_call>";
inline constexpr std::string_view kToolCallClose = "</tool_call>";

/// A `<tool_call>` block that could not be turned into an Action.
struct ParseFailure {
  std::string reason;  // "unknown tool", "malformed arguments: ...", ...
  std::string name;    // tool name when one could be read
  std::string raw;     // block payload as emitted

  bool operator==(const ParseFailure&) const = default;
};

using ParsedCall = std::variant<Action, ParseFailure>;

struct ParsedCalls {
  std::vector<ParsedCall> calls;  // document order

  bool empty() const noexcept { return calls.empty(); }
  std::vector<Action> actions() const;
  std::vector<ParseFailure> failures() const;
};

/// Builds an action from a tool name and its arguments. Throws ProtocolError
/// (message is the parse-failure reason) for unknown names or argument
/// shape/type problems. Value ranges (n >= 1, weights) are checked at
/// execution, not here.
Action action_from_call(std::string_view name, const nlohmann::json& arguments);

/// Extracts every `<tool_call>{"name": ..., "arguments": {...}}</tool_call>`
/// block. `arguments` may also be a JSON-encoded string. Never throws.
ParsedCalls parse_tool_calls(std::string_view assistant_text);

/// Canonical block for one primitive: <tool_call>\n{json}\n</tool_call>.
std::string render_tool_call(const Action& action);

/// Blocks for a suite, newline separated. Answer actions are rendered as
/// their plain text.
std::string render_tool_calls(std::span<const Action> actions);

/// Text outside every tool_call block (unterminated blocks run to the end).
std::string strip_tool_calls(std::string_view text);

bool contains_tool_call(std::string_view text);

}  // namespace cie
