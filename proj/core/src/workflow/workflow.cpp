#include "cie/workflow/workflow.hpp"

#include "cie/agent/agent.hpp"
#include "cie/agent/prompts.hpp"
#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

namespace {

constexpr std::string_view kPlanRetryNote =
    "Your reply had no numbered list after \"Primary Plan:\". Reply again with the analysis followed by "
    "\"Primary Plan:\" and the numbered steps.";
constexpr std::string_view kForcedConclusion =
    "CONCLUDE: The iteration limit has been reached. Give the best answer the evidence gathered so far supports.";

std::string format_plan(const PrimaryPlan& plan) {
  std::string out = "Primary Plan:";
  for (std::size_t i = 0; i < plan.steps.size(); ++i) out += "\n" + std::to_string(i + 1) + ". " + plan.steps[i];
  for (const auto& g : plan.parallel_groups) {
    out += "\nParallel:";
    for (std::size_t i = 0; i < g.size(); ++i) out += (i ? ", " : " ") + std::to_string(g[i] + 1);
  }
  return out;
}

std::string think_block(const std::string& thought) { return "<think>\n" + thought + "\n</think>\n"; }

[[noreturn]] void abort_with(Trajectory t, const std::string& reason) { throw TrajectoryAborted(reason, std::move(t)); }

}  // namespace

std::string render_state(const WorkflowState& state) {
  std::string out = "Question: " + state.history.question + "\n\n" + format_plan(state.plan) + "\n\n";
  if (state.current_step < state.plan.steps.size()) {
    out += "Current sub-task: " + std::to_string(state.current_step + 1) + ". " +
           state.plan.steps[state.current_step] + " (failed attempts so far: " + std::to_string(state.attempts) +
           ")\n\n";
  } else {
    out += "Current sub-task: all planned steps have been searched.\n\n";
  }
  out += "Search history:";
  if (state.history.steps.empty()) out += "\n(no searches yet)";
  for (std::size_t i = 0; i < state.history.steps.size(); ++i) {
    const auto& s = state.history.steps[i];
    const auto round = std::to_string(i + 1);
    out += "\n\nRound " + round + " calls:\n" + render_tool_calls(s.actions);
    if (s.info) out += "\nRound " + round + " results:\n" + render_tool_response(*s.info);
  }
  return out;
}

PrimaryPlan plan(const std::string& question, ChatClient& client, const WorkflowConfig& config) {
  std::vector<Message> messages{{"system", std::string(prompt_text("planner"))}, {"user", "Question: " + question}};
  auto reply = client.complete(messages, nullptr, config.chat);
  try {
    return parse_plan(reply);
  } catch (const PlanningError&) {
    messages.push_back({"assistant", reply});
    messages.push_back({"user", std::string(kPlanRetryNote)});
  }
  return parse_plan(client.complete(messages, nullptr, config.chat));
}

Directive reason_step(WorkflowState& state, ChatClient& client, const WorkflowConfig& config) {
  const std::vector<Message> messages{{"system", std::string(prompt_text("reasoner"))},
                                      {"user", render_state(state)}};
  auto d = parse_directive(client.complete(messages, nullptr, config.chat));

  if (auto* r = std::get_if<ReflectRefine>(&d.kind)) {
    if (state.attempts >= config.max_attempts) {
      d.kind = Proceed{"Move on to the next sub-task. " + r->refined_strategy};
    } else {
      ++state.attempts;
    }
  }
  if (std::holds_alternative<Proceed>(d.kind)) {
    if (!state.history.steps.empty() && state.current_step < state.plan.steps.size()) ++state.current_step;
    state.attempts = 0;
  }
  if (d.revised_plan) {
    state.plan.steps.resize(std::min(state.current_step, state.plan.steps.size()));
    for (const auto& s : *d.revised_plan) state.plan.steps.push_back(s);
    std::erase_if(state.plan.parallel_groups, [&](const std::vector<std::size_t>& g) {
      return g.back() >= state.plan.steps.size() || g.front() >= state.current_step;
    });
  }
  return d;
}

StepOutcome execute_directive(const Directive& directive, WorkflowState& state, ChatClient& client,
                              EngineSession& session, const WorkflowConfig& config) {
  StepOutcome out;
  auto& step = out.step;
  step.thought = directive.analysis;
  if (state.history.steps.empty()) step.thought = format_plan(state.plan) + "\n\n" + step.thought;

  const std::vector<Message> messages{
      {"system", std::string(prompt_text("executor"))},
      {"user", render_state(state) + "\n\nInstruction:\n" + directive.analysis}};
  const bool concluding = std::holds_alternative<Conclude>(directive.kind);
  const auto reply = client.complete(messages, concluding ? nullptr : &tool_definitions(), config.chat);

  auto calls = parse_tool_calls(reply);
  if (concluding || calls.empty()) {
    auto answer = std::string(text::trim(strip_think(strip_tool_calls(reply))));
    if (!answer.empty() && (concluding || extract_answer(reply))) {
      step.actions.push_back(Answer{answer});
      step.assistant_text = think_block(step.thought) + answer;
      out.concluded = true;
      return out;
    }
    if (concluding) {
      step.assistant_text = think_block(step.thought);
      out.concluded = true;
      return out;
    }
    step.assistant_text = think_block(step.thought);
    step.info = session.submit(calls);
    ++state.attempts;
    out.failed_attempt = true;
    return out;
  }

  std::size_t dropped = 0;
  if (calls.calls.size() > config.max_calls) {
    dropped = calls.calls.size() - config.max_calls;
    calls.calls.resize(config.max_calls);
  }
  step.actions = calls.actions();
  step.parse_failures = calls.failures();
  step.assistant_text = think_block(step.thought) + render_tool_calls(step.actions);
  step.info = session.submit(calls);
  if (dropped > 0) {
    ActionBlock warn;
    warn.tool = "suite";
    warn.status = BlockStatus::kWarning;
    warn.message = "only the first " + std::to_string(config.max_calls) + " calls were executed; " +
                   std::to_string(dropped) + " ignored";
    step.info->blocks.push_back(std::move(warn));
  }
  if (!step.parse_failures.empty() || step.info->has_errors()) {
    ++state.attempts;
    out.failed_attempt = true;
  }
  return out;
}

Trajectory run_workflow(const std::string& question, ChatClient& client, EngineSession& session,
                        const WorkflowConfig& config) {
  if (config.max_iterations == 0) throw InvalidParameter("max_iterations must be at least 1");
  WorkflowState state;
  state.history.question = question;
  state.history.turn_cap = config.max_iterations;
  try {
    state.plan = plan(question, client, config);
  } catch (const ClientError& e) {
    abort_with(std::move(state.history), e.what());
  }

  auto finish = [&](StepOutcome outcome, bool forced) {
    outcome.step.forced = forced;
    if (!outcome.step.actions.empty()) {
      if (const auto* a = std::get_if<Answer>(&outcome.step.actions.front())) state.history.final_answer = a->text;
    }
    state.history.steps.push_back(std::move(outcome.step));
    return std::move(state.history);
  };

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    try {
      const auto d = reason_step(state, client, config);
      auto outcome = execute_directive(d, state, client, session, config);
      if (outcome.concluded) return finish(std::move(outcome), false);
      state.history.steps.push_back(std::move(outcome.step));
    } catch (const ClientError& e) {
      abort_with(std::move(state.history), e.what());
    }
  }
  try {
    auto outcome = execute_directive(parse_directive(kForcedConclusion), state, client, session, config);
    return finish(std::move(outcome), true);
  } catch (const ClientError& e) {
    abort_with(std::move(state.history), e.what());
  }
}

}  // namespace cie
