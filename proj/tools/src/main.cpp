#include <iostream>

#include <CLI11.hpp>

#include "cie/engine/action.hpp"
#include "cie/error.hpp"
#include "commands.hpp"

namespace {

void add_llm(CLI::App* cmd, std::string& llm, std::string& model) {
  cmd->add_option("--llm", llm, "chat endpoint URL, or script:<file> for canned replies")->required();
  cmd->add_option("--model", model, "model name (overrides the config)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cie::cli;

  CLI::App app{"Corpus interaction engine: indexing, retrieval primitives, agents and evaluation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "JSON settings file")->check(CLI::ExistingFile);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "chunk a line-delimited corpus into an index directory");
  c_ingest->add_option("--input", ingest.input, "documents file")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "index directory")->required();
  c_ingest->add_option("--chunk-words", ingest.chunk_words, "target words per chunk");

  BuildIndexArgs build;
  auto* c_build = app.add_subcommand("build-index", "build the sparse and dense indexes of an ingested corpus");
  c_build->add_option("--index", build.index, "index directory")->required()->check(CLI::ExistingDirectory);

  SearchArgs search;
  auto* c_search = app.add_subcommand("search", "run one retrieval primitive and print the tool response");
  c_search->add_option("--index", search.index, "index directory")->required()->check(CLI::ExistingDirectory);
  c_search->add_option("tool", search.tool, "semantic_search, exact_search or entity_match")
      ->required()
      ->check(CLI::IsMember({"semantic_search", "exact_search", "entity_match"}));
  c_search->add_option("--query", search.query, "query text");
  c_search->add_option("--keywords", search.keywords, "keywords for exact_search");
  c_search->add_option("--entity", search.entity, "entity for entity_match");
  c_search->add_option("--scale", search.scale, "results per search")->check(CLI::PositiveNumber);

  EpisodeArgs agent;
  auto* c_agent = app.add_subcommand("run-agent", "answer one question with the end-to-end agent loop");
  EpisodeArgs workflow;
  auto* c_workflow = app.add_subcommand("run-workflow", "answer one question with the plan/reason/execute workflow");
  for (auto [cmd, args] : {std::pair{c_agent, &agent}, std::pair{c_workflow, &workflow}}) {
    cmd->add_option("--index", args->index, "index directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--question", args->question, "question text")->required();
    add_llm(cmd, args->llm, args->model);
    cmd->add_option("--log", args->log, "write the trajectory log here");
  }

  SynthesizeArgs synth;
  auto* c_synth = app.add_subcommand("synthesize", "run the workflow over a dataset and export filtered SFT records");
  c_synth->add_option("--index", synth.index, "index directory")->required()->check(CLI::ExistingDirectory);
  c_synth->add_option("--dataset", synth.dataset, "question/answer file")->required()->check(CLI::ExistingFile);
  c_synth->add_option("--out", synth.out, "SFT records file")->required();
  add_llm(c_synth, synth.llm, synth.model);
  c_synth->add_option("--log", synth.log, "write every trajectory here");
  c_synth->add_option("--workers", synth.workers, "concurrent episodes")->check(CLI::PositiveNumber);

  RewardArgs reward;
  auto* c_reward = app.add_subcommand("reward", "score logged trajectories against gold answers");
  c_reward->add_option("--trajectories", reward.trajectories, "trajectory log")->required()->check(CLI::ExistingFile);
  c_reward->add_option("--gold", reward.gold, "question/answer file")->required()->check(CLI::ExistingFile);
  c_reward->add_option("--out", reward.out, "write the table here instead of stdout");

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "run a benchmark and print EM/F1 and action statistics");
  c_eval->add_option("--index", eval.index, "index directory")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--dataset", eval.dataset, "question/answer file")->required()->check(CLI::ExistingFile);
  add_llm(c_eval, eval.llm, eval.model);
  c_eval->add_option("--runner", eval.runner, "agent or workflow")->check(CLI::IsMember({"agent", "workflow"}));
  c_eval->add_option("--format", eval.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  c_eval->add_option("--log", eval.log, "write every trajectory here");
  c_eval->add_option("--out", eval.out, "write the report here instead of stdout");
  c_eval->add_option("--workers", eval.workers, "concurrent episodes")->check(CLI::PositiveNumber);

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "expose engine sessions over HTTP");
  c_serve->add_option("--index", serve.index, "index directory")->required()->check(CLI::ExistingDirectory);
  c_serve->add_option("--host", serve.host, "bind address");
  c_serve->add_option("--port", serve.port, "TCP port")->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ingest) return run_ingest(common, ingest, std::cout);
    if (*c_build) return run_build_index(common, build, std::cout);
    if (*c_search) return run_search(common, search, std::cout);
    if (*c_agent) return run_agent_cmd(common, agent, std::cout);
    if (*c_workflow) return run_workflow_cmd(common, workflow, std::cout);
    if (*c_synth) return run_synthesize(common, synth, std::cout);
    if (*c_reward) return run_reward(common, reward, std::cout);
    if (*c_eval) return run_evaluate(common, eval, std::cout);
    if (*c_serve) return run_serve(common, serve, std::cout);
  } catch (const cie::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
