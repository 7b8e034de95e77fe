#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cie/agent/chat.hpp"
#include "cie/agent/trajectory.hpp"
#include "cie/engine/engine.hpp"

namespace cie {

struct PrimaryPlan {
  std::string analysis;
  std::vector<std::string> steps;
  std::vector<std::vector<std::size_t>> parallel_groups;  // 0-based step indices

  bool operator==(const PrimaryPlan&) const = default;
};

struct Proceed {
  std::string next_objective;
  bool operator==(const Proceed&) const = default;
};

struct Conclude {
  std::string summary;
  bool operator==(const Conclude&) const = default;
};

struct ReflectRefine {
  std::string diagnosis;
  std::string refined_strategy;
  bool operator==(const ReflectRefine&) const = default;
};

/// Reasoner output. `analysis` is the full reply; `revised_plan` holds the
/// steps listed under a "REVISED PLAN:" marker.
struct Directive {
  std::variant<Proceed, Conclude, ReflectRefine> kind;
  std::string analysis;
  std::optional<std::vector<std::string>> revised_plan;

  bool operator==(const Directive&) const = default;
};

struct WorkflowConfig {
  std::size_t max_iterations = 12;
  std::size_t max_attempts = 3;  // refines allowed per sub-task before a forced advance
  std::size_t max_calls = 2;     // executor calls run per turn
  ChatOptions chat;
};

struct WorkflowState {
  PrimaryPlan plan;
  std::size_t current_step = 0;
  std::size_t attempts = 0;
  Trajectory history;
};

struct StepOutcome {
  Step step;
  bool concluded = false;
  bool failed_attempt = false;
};

/// Reads the numbered list after "Primary Plan:" and an optional
/// "Parallel: i, j" line. Throws PlanningError when there is no list.
PrimaryPlan parse_plan(std::string_view planner_reply);

/// Classifies by the PROCEED: / CONCLUDE: / REFINE: keyword, preferring one
/// at the start of the reply. Anything else is ReflectRefine("unparseable").
Directive parse_directive(std::string_view reasoner_reply);

/// Serialized state shown to the reasoner and executor.
std::string render_state(const WorkflowState& state);

/// Planner turn; one retry on an unparseable reply, then PlanningError.
PrimaryPlan plan(const std::string& question, ChatClient& client, const WorkflowConfig& config = {});

/// Reasoner turn. Updates the step index and attempt counter: a PROCEED
/// after at least one search advances, a REFINE counts an attempt, and a
/// REFINE beyond `max_attempts` is turned into a PROCEED.
Directive reason_step(WorkflowState& state, ChatClient& client, const WorkflowConfig& config = {});

/// Executor turn: tool calls for PROCEED/REFINE (at most `max_calls` run,
/// extras reported in a warning block), the final answer for CONCLUDE.
/// Parse failures or a reply without calls count as a failed attempt.
StepOutcome execute_directive(const Directive& directive, WorkflowState& state, ChatClient& client,
                              EngineSession& session, const WorkflowConfig& config = {});

/// plan, then reason/execute until CONCLUDE or `max_iterations`, after which
/// a conclusion is forced. Throws PlanningError and TrajectoryAborted.
Trajectory run_workflow(const std::string& question, ChatClient& client, EngineSession& session,
                        const WorkflowConfig& config = {});

}  // namespace cie
