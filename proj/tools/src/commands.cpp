#include "commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>

#include "cie/agent/http_chat_client.hpp"
#include "cie/agent/scripted_client.hpp"
#include "cie/config.hpp"
#include "cie/corpus.hpp"
#include "cie/error.hpp"
#include "cie/eval/benchmark.hpp"
#include "cie/eval/report.hpp"
#include "cie/server.hpp"
#include "cie/training/training.hpp"
#include "cie/workspace.hpp"

namespace cie::cli {

namespace {

constexpr std::string_view kScriptPrefix = "script:";

Config load_config(const Common& c) { return c.config ? Config::load(*c.config) : Config{}; }

std::unique_ptr<Workspace> open_workspace(const Config& config, const std::filesystem::path& index) {
  return Workspace::open(index, make_embedder(config.embedding), engine_options(config));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

/// A chat client per episode: scripted clients are looked up by question,
/// HTTP clients are fresh instances of the same endpoint.
class ClientSource {
 public:
  ClientSource(const Config& config, const std::string& llm, const std::string& model) {
    if (llm.starts_with(kScriptPrefix)) {
      book_ = ScriptBook::load(llm.substr(kScriptPrefix.size()));
    } else {
      http_ = chat_config(config, llm, model);
    }
  }

  std::unique_ptr<ChatClient> make(const std::string& question) const {
    if (book_) return book_->client_for(question);
    return std::make_unique<HttpChatClient>(*http_);
  }

  ClientFactory factory() const {
    return [this](const QAExample& ex) { return make(ex.question); };
  }

 private:
  std::optional<ScriptBook> book_;
  std::optional<HttpChatConfig> http_;
};

void print_trajectory(const Trajectory& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out << "step " << i + 1 << (s.forced ? " (forced)" : "") << ":";
    for (const auto& a : s.actions) out << ' ' << describe(a);
    for (const auto& f : s.parse_failures) out << " [rejected " << (f.name.empty() ? "call" : f.name) << ": " << f.reason << ']';
    if (s.info && s.info->has_errors()) out << " [tool errors]";
    out << '\n';
  }
  if (t.final_answer) {
    out << "answer: " << *t.final_answer << '\n';
  } else {
    out << "answer: (none)\n";
  }
}

int run_episode_cmd(const Common& c, const EpisodeArgs& a, std::ostream& out, Runner runner) {
  const auto config = load_config(c);
  const auto ws = open_workspace(config, a.index);
  const ClientSource source(config, a.llm, a.model);
  const auto client = source.make(a.question);
  BenchmarkConfig bc;
  bc.runner = runner;
  bc.agent = agent_config(config);
  bc.workflow = workflow_config(config);
  const auto result = run_episode({a.question, {"-"}, "cli"}, ws->engine(), *client, bc);
  print_trajectory(result.trajectory, out);
  if (a.log) {
    auto log = open_out(*a.log);
    write_trajectory_log(log, 1, result.trajectory);
  }
  if (result.error) {
    std::cerr << "episode aborted: " << *result.error << '\n';
    return 1;
  }
  return 0;
}

BenchmarkConfig benchmark_config(const Config& config, Runner runner, std::optional<std::size_t> workers) {
  BenchmarkConfig bc;
  bc.runner = runner;
  bc.agent = agent_config(config);
  bc.workflow = workflow_config(config);
  bc.workers = workers.value_or(config.defaults.workers);
  return bc;
}

Runner parse_runner(const std::string& name) {
  if (name == "agent") return Runner::kAgent;
  if (name == "workflow") return Runner::kWorkflow;
  throw ConfigError("unknown runner '" + name + "' (agent or workflow)");
}

}  // namespace

int run_ingest(const Common& c, const IngestArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto m = ingest_corpus(a.input, a.out, a.chunk_words.value_or(config.chunk_words));
  out << "ingested " << m.num_documents << " documents into " << m.num_chunks << " chunks (corpus " << m.corpus_id
      << ")\n";
  return 0;
}

int run_build_index(const Common& c, const BuildIndexArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto provider = make_embedder(config.embedding);
  const auto s = build_indexes(a.index, *provider);
  out << "indexed " << s.chunks << " chunks: " << s.vocabulary << " terms, " << s.provider_id << " vectors of dimension "
      << s.dimension << '\n';
  return 0;
}

int run_search(const Common& c, const SearchArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto ws = open_workspace(config, a.index);
  nlohmann::json args = nlohmann::json::object();
  if (!a.query.empty()) args["query"] = a.query;
  if (!a.keywords.empty()) args["keywords"] = a.keywords;
  if (!a.entity.empty()) args["entity"] = a.entity;
  std::vector<Action> suite;
  if (a.scale) suite.push_back(AdjustScale{static_cast<std::int64_t>(*a.scale)});
  suite.push_back(action_from_call(a.tool, args));
  EngineSession session(ws->engine());
  out << render_tool_response(session.submit(suite)) << '\n';
  return 0;
}

int run_agent_cmd(const Common& c, const EpisodeArgs& a, std::ostream& out) {
  return run_episode_cmd(c, a, out, Runner::kAgent);
}

int run_workflow_cmd(const Common& c, const EpisodeArgs& a, std::ostream& out) {
  return run_episode_cmd(c, a, out, Runner::kWorkflow);
}

int run_synthesize(const Common& c, const SynthesizeArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto dataset = load_dataset(a.dataset);
  const auto ws = open_workspace(config, a.index);
  const ClientSource source(config, a.llm, a.model);
  const auto report =
      run_benchmark(dataset, ws->engine(), source.factory(), benchmark_config(config, Runner::kWorkflow, a.workers));
  if (a.log) {
    auto log = open_out(*a.log);
    write_episode_log(log, report.episodes);
  }
  std::vector<LabeledTrajectory> labeled;
  for (const auto& e : report.episodes) labeled.emplace_back(e.trajectory, e.example.gold_answers);
  const auto kept = filter_trajectories(labeled);
  auto sft = open_out(a.out);
  for (const auto& t : kept) sft << sft_to_json(export_sft(t)).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  out << "kept " << kept.size() << " of " << report.episodes.size() << " trajectories (" << report.overall.num_errors
      << " aborted)\n";
  return 0;
}

int run_reward(const Common&, const RewardArgs& a, std::ostream& out) {
  std::ifstream in(a.trajectories);
  if (!in) throw LoadError("cannot read " + a.trajectories.string());
  const auto trajectories = read_trajectory_log(in);
  std::map<std::string, std::vector<std::string>> gold;
  for (auto& ex : load_dataset(a.gold)) gold.emplace(ex.question, std::move(ex.gold_answers));

  std::optional<std::ofstream> file;
  if (a.out) file = open_out(*a.out);
  std::ostream& table = file ? *file : out;
  table << "episode\tquestion\tfinal_answer\tvalid\tbase\tvalidity_bonus\tanswer_bonus\ttotal\tviolations\n";
  std::map<int, std::size_t> histogram;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& t = trajectories[i];
    const auto g = gold.find(t.question);
    if (g == gold.end()) throw LoadError("no gold answers for question: " + t.question);
    const auto verdict = validate_trajectory(t);
    const auto r = reward(t, g->second);
    std::string violations;
    for (const auto& v : verdict.violations) {
      if (!violations.empty()) violations += ',';
      violations += std::string(rule_id(v.rule)) + "@" + std::to_string(v.step);
    }
    table << i + 1 << '\t' << t.question << '\t' << t.final_answer.value_or("") << '\t' << (verdict.valid ? 1 : 0)
          << '\t' << r.base << '\t' << r.validity_bonus << '\t' << r.answer_bonus << '\t' << r.total() << '\t'
          << violations << '\n';
    ++histogram[r.total()];
  }
  std::cerr << "rewards: " << histogram[1] << " x 1, " << histogram[0] << " x 0, " << histogram[-1] << " x -1\n";
  return 0;
}

int run_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto format = parse_report_format(a.format);
  const auto runner = parse_runner(a.runner);
  const auto dataset = load_dataset(a.dataset);
  const auto ws = open_workspace(config, a.index);
  const ClientSource source(config, a.llm, a.model);
  const auto report = run_benchmark(dataset, ws->engine(), source.factory(), benchmark_config(config, runner, a.workers));
  if (a.log) {
    auto log = open_out(*a.log);
    write_episode_log(log, report.episodes);
  }
  const auto rendered = emit_report(report, format);
  if (a.out) {
    open_out(*a.out) << rendered;
  } else {
    out << rendered;
  }
  for (std::size_t i = 0; i < report.episodes.size(); ++i) {
    if (report.episodes[i].error) std::cerr << "episode " << i + 1 << " failed: " << *report.episodes[i].error << '\n';
  }
  return 0;
}

namespace {
Server* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int run_serve(const Common& c, const ServeArgs& a, std::ostream& out) {
  const auto config = load_config(c);
  const auto ws = open_workspace(config, a.index);
  Server server(ws->engine());
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  out << "serving " << ws->corpus().chunks().size() << " chunks on http://" << a.host << ':' << a.port << std::endl;
  server.listen(a.host, a.port);
  g_server = nullptr;
  return 0;
}

}  // namespace cie::cli
