#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cie/agent/agent.hpp"
#include "cie/agent/chat.hpp"
#include "cie/engine/engine.hpp"
#include "cie/eval/dataset.hpp"
#include "cie/workflow/workflow.hpp"

namespace cie {

enum class Runner { kAgent, kWorkflow };

/// Makes the chat client for one episode.
using ClientFactory = std::function<std::unique_ptr<ChatClient>(const QAExample&)>;

struct BenchmarkConfig {
  Runner runner = Runner::kAgent;
  AgentConfig agent;
  WorkflowConfig workflow;
  std::size_t workers = 4;
};

struct EpisodeResult {
  QAExample example;
  Trajectory trajectory;
  double em = 0.0;
  double f1 = 0.0;
  std::optional<std::string> error;
};

/// Aggregates for one dataset tag (or "overall"). EM and F1 are percentages;
/// action_counts is the mean number of calls per question by primitive.
struct DatasetScores {
  std::string dataset;
  std::size_t num_examples = 0;
  std::size_t num_errors = 0;
  double em = 0.0;
  double f1 = 0.0;
  double avg_turns = 0.0;
  std::map<std::string, double> action_counts;
};

struct EvalReport {
  std::vector<DatasetScores> datasets;  // sorted by tag
  DatasetScores overall;
  std::vector<EpisodeResult> episodes;  // dataset order
};

/// One episode of the chosen runner. Client failures and aborted
/// trajectories score zero with the reason in `error`; never throws for
/// per-episode problems.
EpisodeResult run_episode(const QAExample& example, const Engine& engine, ChatClient& client,
                          const BenchmarkConfig& config);

/// Runs every example on a pool of `workers` threads, then aggregates.
EvalReport run_benchmark(const std::vector<QAExample>& dataset, const Engine& engine, const ClientFactory& factory,
                         const BenchmarkConfig& config = {});

/// Aggregates episodes, grouping by dataset tag.
EvalReport aggregate(std::vector<EpisodeResult> episodes);

/// Appends each episode's trajectory log records, episodes numbered from 1.
void write_episode_log(std::ostream& out, const std::vector<EpisodeResult>& episodes);

}  // namespace cie
