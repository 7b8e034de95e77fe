#include "cie/training/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>

#include "cie/agent/agent.hpp"
#include "cie/agent/prompts.hpp"
#include "cie/error.hpp"
#include "cie/eval/metrics.hpp"
#include "cie/text.hpp"

namespace cie {

namespace {

constexpr double kAdvantageEpsilon = 1e-8;

bool has_answer(const Step& s) {
  return std::any_of(s.actions.begin(), s.actions.end(), [](const Action& a) { return is_answer(a); });
}

}  // namespace

std::string_view rule_id(Rule r) {
  switch (r) {
    case Rule::kEmptyThought: return "empty-thought";
    case Rule::kBadToolSyntax: return "bad-tool-syntax";
    case Rule::kNoFinalAnswer: return "no-final-answer";
    case Rule::kMixedAnswer: return "mixed-answer";
    case Rule::kTurnCap: return "turn-cap";
  }
  return "unknown";
}

TrajectoryVerdict validate_trajectory(const Trajectory& t) {
  TrajectoryVerdict v;
  auto flag = [&](std::size_t step, Rule rule, std::string description) {
    v.violations.push_back({step, rule, std::move(description)});
  };
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    const auto n = i + 1;
    const bool last = n == t.steps.size();
    if (text::trim(s.thought).empty()) flag(n, Rule::kEmptyThought, "step has no thought");
    if (has_answer(s) && s.actions.size() > 1) flag(n, Rule::kMixedAnswer, "answer combined with tool calls");
    if (!s.parse_failures.empty()) {
      flag(n, Rule::kBadToolSyntax, s.parse_failures.front().reason);
    } else if (!last && s.actions.empty()) {
      flag(n, Rule::kBadToolSyntax, "no tool call");
    }
  }
  const bool answered = !t.steps.empty() && t.steps.back().actions.size() == 1 &&
                        is_answer(t.steps.back().actions.front()) && t.final_answer.has_value() &&
                        !t.abort_reason.has_value();
  if (!answered) {
    flag(t.steps.empty() ? 0 : t.steps.size(), Rule::kNoFinalAnswer,
         t.abort_reason ? "aborted: " + *t.abort_reason : "trajectory does not end with an answer");
  }
  if (t.steps.size() > t.turn_cap + 1) {
    flag(t.steps.size(), Rule::kTurnCap,
         std::to_string(t.steps.size()) + " steps exceed cap " + std::to_string(t.turn_cap) + " + 1");
  }
  v.valid = v.violations.empty();
  return v;
}

RewardBreakdown reward(const Trajectory& t, std::span<const std::string> gold_answers) {
  if (gold_answers.empty()) throw InvalidParameter("reward needs at least one gold answer");
  RewardBreakdown r;
  r.validity_bonus = validate_trajectory(t).valid ? 1 : 0;
  if (r.validity_bonus == 1) r.answer_bonus = exact_match(t.final_answer.value_or(""), gold_answers);
  return r;
}

std::vector<Trajectory> filter_trajectories(std::span<const LabeledTrajectory> pairs) {
  std::vector<Trajectory> out;
  for (const auto& [t, gold] : pairs) {
    if (reward(t, gold).total() == 1) out.push_back(t);
  }
  return out;
}

SftRecord export_sft(const Trajectory& t) { return export_sft(t, prompt_text("agent_system")); }

SftRecord export_sft(const Trajectory& t, std::string_view system_prompt) {
  const auto verdict = validate_trajectory(t);
  if (!verdict.valid) {
    const auto& first = verdict.violations.front();
    throw ExportError("cannot export invalid trajectory: step " + std::to_string(first.step) + " " +
                      std::string(rule_id(first.rule)) + " (" + first.description + ")");
  }
  SftRecord r;
  r.messages = render_messages(t, system_prompt);
  for (const auto& m : r.messages) r.loss_mask.push_back(m.role == "assistant");
  return r;
}

Trajectory trajectory_from_sft(const SftRecord& r, std::size_t turn_cap) {
  const auto& m = r.messages;
  if (m.size() < 2 || m[0].role != "system" || m[1].role != "user") {
    throw LoadError("record must start with a system and a user message");
  }
  Trajectory t;
  t.question = m[1].content;
  t.turn_cap = turn_cap;
  std::optional<std::string> note;
  for (std::size_t i = 2; i < m.size(); ++i) {
    if (m[i].role == "user") {
      if (note) throw LoadError("two user messages in a row at message " + std::to_string(i + 1));
      note = m[i].content;
    } else if (m[i].role == "assistant") {
      Step s;
      s.assistant_text = m[i].content;
      s.thought = extract_thought(s.assistant_text);
      s.user_note = std::exchange(note, std::nullopt);
      s.forced = s.user_note.has_value();
      const auto calls = parse_tool_calls(s.assistant_text);
      if (calls.empty()) {
        if (auto answer = extract_answer(s.assistant_text)) {
          s.actions.push_back(Answer{*answer});
          if (i + 1 == m.size()) t.final_answer = std::move(*answer);
        }
      } else {
        s.actions = calls.actions();
        s.parse_failures = calls.failures();
        if (auto rest = trailing_text(s.assistant_text); !rest.empty()) s.actions.push_back(Answer{rest});
      }
      t.steps.push_back(std::move(s));
    } else if (m[i].role == "tool") {
      if (t.steps.empty() || t.steps.back().info || i == 2 || m[i - 1].role != "assistant") {
        throw LoadError("tool message without a preceding assistant turn at message " + std::to_string(i + 1));
      }
      try {
        t.steps.back().info = parse_tool_response(m[i].content);
      } catch (const ProtocolError& e) {
        throw LoadError("message " + std::to_string(i + 1) + ": " + e.what());
      }
    } else {
      throw LoadError("unknown role '" + m[i].role + "'");
    }
  }
  return t;
}

nlohmann::ordered_json sft_to_json(const SftRecord& r) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const auto& m : r.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return {{"messages", std::move(messages)}, {"loss_mask", r.loss_mask}};
}

SftRecord sft_from_json(const nlohmann::json& j) {
  SftRecord r;
  for (const auto& m : j.at("messages")) {
    r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  r.loss_mask = j.at("loss_mask").get<std::vector<bool>>();
  if (r.loss_mask.size() != r.messages.size()) throw LoadError("loss_mask length differs from messages");
  return r;
}

std::vector<double> group_advantage(std::span<const double> rewards) {
  if (rewards.size() < 2) throw GroupTooSmall(rewards.size());
  const auto n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std_pop = std::sqrt(var / n);
  std::vector<double> out;
  out.reserve(rewards.size());
  const double denom = std::max(std_pop, kAdvantageEpsilon);
  for (double r : rewards) out.push_back((r - mean) / denom);
  return out;
}

}  // namespace cie
