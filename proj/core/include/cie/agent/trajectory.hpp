#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cie/engine/action.hpp"
#include "cie/engine/protocol.hpp"
#include "cie/engine/tool_response.hpp"
#include "cie/error.hpp"

namespace cie {

/// One agent turn: what the model said, what was parsed out of it, and the
/// engine's reply. A step holding an Answer has no info.
struct Step {
  std::string thought;
  std::string assistant_text;
  std::vector<Action> actions;
  std::vector<ParseFailure> parse_failures;
  std::optional<ToolResponse> info;
  /// Extra user message shown before this turn (the finalization request).
  std::optional<std::string> user_note;
  bool forced = false;

  bool operator==(const Step&) const = default;
};

/// Append-only episode record shared by the agent loop and the workflow.
struct Trajectory {
  static constexpr std::size_t kDefaultTurnCap = 7;

  std::string question;
  std::vector<Step> steps;
  std::optional<std::string> final_answer;
  std::size_t turn_cap = kDefaultTurnCap;
  std::optional<std::string> abort_reason;

  bool operator==(const Trajectory&) const = default;
};

/// The episode could not continue. Carries everything recorded so far.
class TrajectoryAborted : public Error {
 public:
  TrajectoryAborted(const std::string& reason, Trajectory partial)
      : Error("trajectory aborted: " + reason), partial_(std::move(partial)) {
    partial_.abort_reason = reason;
  }
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

nlohmann::ordered_json action_to_json(const Action& a);
/// Inverse of action_to_json; "answer" maps to Answer. Throws ProtocolError.
Action action_from_json(const nlohmann::json& j);

nlohmann::ordered_json step_to_json(const Step& s);
Step step_from_json(const nlohmann::json& j);

/// Line-delimited log: one record per step, tagged with the episode number
/// and question, plus one closing record for aborted episodes. Tool
/// responses are stored as the exact text the model saw.
void write_trajectory_log(std::ostream& out, std::size_t episode, const Trajectory& t);

/// Groups log records back into trajectories in file order. Throws LoadError.
std::vector<Trajectory> read_trajectory_log(std::istream& in);

}  // namespace cie
