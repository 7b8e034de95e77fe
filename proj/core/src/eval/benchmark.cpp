#include "cie/eval/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "cie/error.hpp"
#include "cie/eval/metrics.hpp"

namespace cie {

EpisodeResult run_episode(const QAExample& example, const Engine& engine, ChatClient& client,
                          const BenchmarkConfig& config) {
  EpisodeResult r;
  r.example = example;
  r.trajectory.question = example.question;
  EngineSession session(engine);
  try {
    r.trajectory = config.runner == Runner::kAgent ? run_agent(example.question, client, session, config.agent)
                                                   : run_workflow(example.question, client, session, config.workflow);
  } catch (const TrajectoryAborted& e) {
    r.trajectory = e.partial();
    r.error = e.what();
    return r;
  } catch (const Error& e) {
    r.trajectory.abort_reason = e.what();
    r.error = e.what();
    return r;
  }
  const auto answer = r.trajectory.final_answer.value_or("");
  r.em = exact_match(answer, example.gold_answers);
  r.f1 = f1_score(answer, example.gold_answers);
  return r;
}

EvalReport run_benchmark(const std::vector<QAExample>& dataset, const Engine& engine, const ClientFactory& factory,
                         const BenchmarkConfig& config) {
  std::vector<EpisodeResult> results(dataset.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < dataset.size(); i = next++) {
      try {
        auto client = factory(dataset[i]);
        results[i] = run_episode(dataset[i], engine, *client, config);
      } catch (const std::exception& e) {
        results[i].example = dataset[i];
        results[i].trajectory.question = dataset[i].question;
        results[i].trajectory.abort_reason = e.what();
        results[i].error = e.what();
      }
    }
  };
  const auto n_workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(dataset.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  return aggregate(std::move(results));
}

namespace {

DatasetScores summarize(const std::string& tag, const std::vector<const EpisodeResult*>& eps) {
  DatasetScores s;
  s.dataset = tag;
  s.num_examples = eps.size();
  for (auto name : primitive_names()) s.action_counts[std::string(name)] = 0.0;
  if (eps.empty()) return s;
  for (const auto* e : eps) {
    s.em += e->em;
    s.f1 += e->f1;
    s.avg_turns += static_cast<double>(e->trajectory.steps.size());
    s.num_errors += e->error ? 1 : 0;
    for (const auto& step : e->trajectory.steps) {
      for (const auto& a : step.actions) {
        if (!is_answer(a)) s.action_counts[std::string(action_name(a))] += 1.0;
      }
    }
  }
  const auto n = static_cast<double>(eps.size());
  s.em = 100.0 * s.em / n;
  s.f1 = 100.0 * s.f1 / n;
  s.avg_turns /= n;
  for (auto& [name, count] : s.action_counts) count /= n;
  return s;
}

}  // namespace

EvalReport aggregate(std::vector<EpisodeResult> episodes) {
  EvalReport report;
  report.episodes = std::move(episodes);
  std::map<std::string, std::vector<const EpisodeResult*>> by_tag;
  std::vector<const EpisodeResult*> all;
  for (const auto& e : report.episodes) {
    by_tag[e.example.dataset_tag].push_back(&e);
    all.push_back(&e);
  }
  for (const auto& [tag, eps] : by_tag) report.datasets.push_back(summarize(tag, eps));
  report.overall = summarize("overall", all);
  return report;
}

void write_episode_log(std::ostream& out, const std::vector<EpisodeResult>& episodes) {
  for (std::size_t i = 0; i < episodes.size(); ++i) write_trajectory_log(out, i + 1, episodes[i].trajectory);
}

}  // namespace cie
