#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cie/agent/chat.hpp"
#include "cie/agent/trajectory.hpp"

namespace cie {

enum class Rule { kEmptyThought, kBadToolSyntax, kNoFinalAnswer, kMixedAnswer, kTurnCap };

/// "empty-thought", "bad-tool-syntax", "no-final-answer", "mixed-answer", "turn-cap".
std::string_view rule_id(Rule r);

/// `step` is 1-based; 0 marks a whole-trajectory violation.
struct Violation {
  std::size_t step = 0;
  Rule rule = Rule::kEmptyThought;
  std::string description;

  bool operator==(const Violation&) const = default;
};

struct TrajectoryVerdict {
  bool valid = true;
  std::vector<Violation> violations;
};

/// Checks: every step has a thought; every non-final step has a non-empty,
/// fully parsed tool-call suite; the final step is a lone Answer; no step
/// mixes Answer with tool calls; at most turn_cap + 1 steps.
TrajectoryVerdict validate_trajectory(const Trajectory& t);

struct RewardBreakdown {
  int base = -1;
  int validity_bonus = 0;
  int answer_bonus = 0;

  int total() const noexcept { return base + validity_bonus + answer_bonus; }
  bool operator==(const RewardBreakdown&) const = default;
};

/// -1 + valid + valid * EM(final answer, golds). Throws InvalidParameter for
/// an empty gold list.
RewardBreakdown reward(const Trajectory& t, std::span<const std::string> gold_answers);

using LabeledTrajectory = std::pair<Trajectory, std::vector<std::string>>;

/// Trajectories whose reward total is 1, in input order.
std::vector<Trajectory> filter_trajectories(std::span<const LabeledTrajectory> pairs);

struct SftRecord {
  std::vector<Message> messages;
  std::vector<bool> loss_mask;  // true exactly on assistant messages

  bool operator==(const SftRecord&) const = default;
};

/// Messages as the end-to-end agent would see them, with the loss mask.
/// Throws ExportError for an invalid trajectory.
SftRecord export_sft(const Trajectory& t);
SftRecord export_sft(const Trajectory& t, std::string_view system_prompt);

/// Rebuilds the trajectory an exported record was rendered from, reading
/// assistant turns the way the agent loop does. A step preceded by an extra
/// user message is marked forced. Throws LoadError on an out-of-order
/// message sequence.
Trajectory trajectory_from_sft(const SftRecord& r, std::size_t turn_cap = Trajectory::kDefaultTurnCap);

nlohmann::ordered_json sft_to_json(const SftRecord& r);
SftRecord sft_from_json(const nlohmann::json& j);

/// (r - mean) / max(population std, 1e-8); an all-equal group maps to
/// zeros. Throws GroupTooSmall below 2.
std::vector<double> group_advantage(std::span<const double> rewards);

}  // namespace cie
