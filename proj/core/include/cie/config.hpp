#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "cie/agent/agent.hpp"
#include "cie/agent/http_chat_client.hpp"
#include "cie/embedding.hpp"
#include "cie/engine/engine.hpp"
#include "cie/workflow/workflow.hpp"

namespace cie {

struct EmbeddingSettings {
  std::string provider = "hash";  // "hash" or "http"
  std::string url;
  std::string model;
  std::size_t dimension = 64;
  std::string api_key_env = "CIE_EMBED_API_KEY";
};

struct LlmSettings {
  std::string url;
  std::string model;
  std::string api_key_env = "CIE_LLM_API_KEY";
  bool native_tools = true;
  int timeout_s = 120;
  int max_retries = 3;
  double temperature = 0.0;
};

struct RuntimeDefaults {
  double w_s = SessionState::kDefaultSemanticWeight;
  double w_e = SessionState::kDefaultExactWeight;
  std::size_t scale = SessionState::kDefaultScale;
  std::size_t max_turns = Trajectory::kDefaultTurnCap;
  std::size_t max_iterations = 12;
  std::size_t max_attempts = 3;
  std::size_t workers = 4;
};

/// Settings file. Every section and key is optional; unknown keys are
/// rejected. Secrets never live here: only the names of the environment
/// variables that hold them.
struct Config {
  std::size_t chunk_words = 100;
  EmbeddingSettings embedding;
  LlmSettings llm;
  RuntimeDefaults defaults;

  /// Throws ConfigError.
  static Config load(const std::filesystem::path& file);
  static Config parse(std::string_view json_text);
};

/// Throws ConfigError for an unknown provider or a missing endpoint.
std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingSettings& settings);

EngineOptions engine_options(const Config& config);
AgentConfig agent_config(const Config& config);
WorkflowConfig workflow_config(const Config& config);

/// `url` and `model` override the config values when non-empty. Throws
/// ConfigError when no endpoint is known.
HttpChatConfig chat_config(const Config& config, std::string_view url = {}, std::string_view model = {});

}  // namespace cie
