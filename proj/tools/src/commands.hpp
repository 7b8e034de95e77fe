#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace cie::cli {

struct Common {
  std::optional<std::filesystem::path> config;
};

struct IngestArgs {
  std::filesystem::path input;
  std::filesystem::path out;
  std::optional<std::size_t> chunk_words;
};

struct BuildIndexArgs {
  std::filesystem::path index;
};

struct SearchArgs {
  std::filesystem::path index;
  std::string tool;
  std::string query;
  std::string keywords;
  std::string entity;
  std::optional<std::size_t> scale;
};

/// `llm` is "script:<file>" for canned replies keyed by question, otherwise
/// a chat-completions URL.
struct EpisodeArgs {
  std::filesystem::path index;
  std::string question;
  std::string llm;
  std::string model;
  std::optional<std::filesystem::path> log;
};

struct SynthesizeArgs {
  std::filesystem::path index;
  std::filesystem::path dataset;
  std::filesystem::path out;
  std::string llm;
  std::string model;
  std::optional<std::filesystem::path> log;
  std::optional<std::size_t> workers;
};

struct RewardArgs {
  std::filesystem::path trajectories;
  std::filesystem::path gold;
  std::optional<std::filesystem::path> out;
};

struct EvaluateArgs {
  std::filesystem::path index;
  std::filesystem::path dataset;
  std::string llm;
  std::string model;
  std::string runner = "agent";
  std::string format = "text";
  std::optional<std::filesystem::path> log;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> workers;
};

struct ServeArgs {
  std::filesystem::path index;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int run_ingest(const Common& c, const IngestArgs& a, std::ostream& out);
int run_build_index(const Common& c, const BuildIndexArgs& a, std::ostream& out);
int run_search(const Common& c, const SearchArgs& a, std::ostream& out);
int run_agent_cmd(const Common& c, const EpisodeArgs& a, std::ostream& out);
int run_workflow_cmd(const Common& c, const EpisodeArgs& a, std::ostream& out);
int run_synthesize(const Common& c, const SynthesizeArgs& a, std::ostream& out);
int run_reward(const Common& c, const RewardArgs& a, std::ostream& out);
int run_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out);
int run_serve(const Common& c, const ServeArgs& a, std::ostream& out);

}  // namespace cie::cli
