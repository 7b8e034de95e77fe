#include "cie/agent/agent.hpp"

#include "cie/agent/prompts.hpp"
#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::size_t kMaxNoActionTurns = 2;

[[noreturn]] void abort_with(Trajectory t, const std::string& reason) { throw TrajectoryAborted(reason, std::move(t)); }

}  // namespace

// Some chat templates open the think block in the prompt, hence the stray
// closing tag case.
std::string strip_think(std::string_view text) {
  if (text.find(kThinkOpen) == std::string_view::npos) {
    if (const auto close = text.find(kThinkClose); close != std::string_view::npos) {
      text.remove_prefix(close + kThinkClose.size());
    }
  }
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find(kThinkOpen, pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const auto close = text.find(kThinkClose, open + kThinkOpen.size());
    if (close == std::string_view::npos) break;
    pos = close + kThinkClose.size();
  }
  return out;
}

std::string extract_thought(std::string_view text) {
  if (const auto open = text.find(kThinkOpen); open != std::string_view::npos) {
    const auto body = open + kThinkOpen.size();
    const auto close = text.find(kThinkClose, body);
    return std::string(text::trim(text.substr(body, close == std::string_view::npos ? close : close - body)));
  }
  if (const auto close = text.find(kThinkClose); close != std::string_view::npos) {
    return std::string(text::trim(text.substr(0, close)));
  }
  const auto call = text.find(kToolCallOpen);
  if (call == std::string_view::npos) return {};
  return std::string(text::trim(text.substr(0, call)));
}

std::optional<std::string> extract_answer(std::string_view text) {
  if (contains_tool_call(text)) return std::nullopt;
  auto answer = std::string(text::trim(strip_think(text)));
  if (answer.empty()) return std::nullopt;
  return answer;
}

std::string trailing_text(std::string_view text) {
  const auto last = text.rfind(kToolCallClose);
  if (last == std::string_view::npos) return {};
  return std::string(text::trim(strip_think(text.substr(last + kToolCallClose.size()))));
}

std::vector<Message> render_messages(const Trajectory& t, std::string_view system_prompt) {
  std::vector<Message> out{{"system", std::string(system_prompt)}, {"user", t.question}};
  for (const auto& s : t.steps) {
    if (s.user_note) out.push_back({"user", *s.user_note});
    out.push_back({"assistant", s.assistant_text});
    if (s.info) out.push_back({"tool", render_tool_response(*s.info)});
  }
  return out;
}

Trajectory run_agent(const std::string& question, ChatClient& client, EngineSession& session,
                     const AgentConfig& config) {
  if (config.max_turns == 0) throw InvalidParameter("max_turns must be at least 1");
  const auto system = prompt_text(config.system_prompt_id);
  const auto& tools = tool_definitions();

  Trajectory t;
  t.question = question;
  t.turn_cap = config.max_turns;
  std::size_t idle = 0;

  for (std::size_t turn = 0; turn < config.max_turns; ++turn) {
    std::string reply;
    try {
      reply = client.complete(render_messages(t, system), &tools, config.chat);
    } catch (const ClientError& e) {
      abort_with(std::move(t), e.what());
    }
    Step step;
    step.assistant_text = reply;
    step.thought = extract_thought(reply);
    auto calls = parse_tool_calls(reply);

    if (calls.empty()) {
      if (auto answer = extract_answer(reply)) {
        step.actions.push_back(Answer{*answer});
        t.final_answer = std::move(*answer);
        t.steps.push_back(std::move(step));
        return t;
      }
      step.info = session.submit(calls);
      t.steps.push_back(std::move(step));
      if (++idle >= kMaxNoActionTurns) abort_with(std::move(t), "no tool call or answer in consecutive turns");
      continue;
    }

    idle = 0;
    if (auto trailing = trailing_text(reply); !trailing.empty()) calls.calls.emplace_back(Action{Answer{trailing}});
    step.actions = calls.actions();
    step.parse_failures = calls.failures();
    step.info = session.submit(calls);
    t.steps.push_back(std::move(step));
  }

  Step forced;
  forced.forced = true;
  forced.user_note = std::string(prompt_text("finalize"));
  auto messages = render_messages(t, system);
  messages.push_back({"user", *forced.user_note});
  try {
    forced.assistant_text = client.complete(messages, nullptr, config.chat);
  } catch (const ClientError& e) {
    abort_with(std::move(t), e.what());
  }
  forced.thought = extract_thought(forced.assistant_text);
  t.steps.push_back(std::move(forced));
  auto& last = t.steps.back();
  const auto& reply = last.assistant_text;
  auto answer = std::string(text::trim(strip_think(strip_tool_calls(reply))));
  if (!answer.empty()) {
    last.actions.push_back(Answer{answer});
    t.final_answer = std::move(answer);
  }
  return t;
}

}  // namespace cie
