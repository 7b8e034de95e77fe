#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cie/agent/chat.hpp"
#include "cie/agent/trajectory.hpp"
#include "cie/engine/engine.hpp"

namespace cie {

struct AgentConfig {
  std::size_t max_turns = Trajectory::kDefaultTurnCap;
  std::string system_prompt_id = "agent_system";
  ChatOptions chat;
};

/// The text with `<think>` blocks removed. An unclosed block runs to the
/// end; a stray closing tag drops everything before it.
std::string strip_think(std::string_view text);

/// Text inside `<think>` tags when present, else the text before the first
/// tool call. Trimmed.
std::string extract_thought(std::string_view assistant_text);

/// The answer carried by a turn without tool calls: the text with any
/// `<think>` block removed, trimmed. None for empty text or any tool call.
std::optional<std::string> extract_answer(std::string_view assistant_text);

/// Text after the last tool call, `<think>` removed, trimmed. Non-empty
/// means the model tried to answer and call tools in the same turn.
std::string trailing_text(std::string_view assistant_text);

/// system, user(question), then per step: [user note], assistant, [tool].
std::vector<Message> render_messages(const Trajectory& t, std::string_view system_prompt);

/// The end-to-end loop: ask the model, run its tool calls, feed back the
/// response, until it answers or `max_turns` turns pass. An unanswered
/// episode gets one extra tools-disabled turn asking for the answer.
/// Throws InvalidParameter (max_turns == 0) and TrajectoryAborted (client
/// failure, or two turns in a row without any tool call or answer).
Trajectory run_agent(const std::string& question, ChatClient& client, EngineSession& session,
                     const AgentConfig& config = {});

}  // namespace cie
