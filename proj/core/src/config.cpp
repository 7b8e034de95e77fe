#include "cie/config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cie/error.hpp"

namespace cie {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(section) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (known) continue;
    if (key == "api_key" || key == "token") {
      throw ConfigError(std::string(section) + "." + key + ": secrets are read from environment variables only");
    }
    throw ConfigError("unknown key " + std::string(section) + "." + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_positive(const json& obj, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto v = obj.at(key).get<std::int64_t>();
  if (v < 1) throw ConfigError(std::string(key) + " must be at least 1");
  out = static_cast<std::size_t>(v);
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

}  // namespace

Config Config::parse(std::string_view json_text) {
  Config c;
  try {
    const auto doc = json::parse(json_text);
    check_keys(doc, "config", {"chunk_words", "embedding", "llm", "defaults"});
    read_positive(doc, "chunk_words", c.chunk_words);
    if (doc.contains("embedding")) {
      const auto& e = doc.at("embedding");
      check_keys(e, "embedding", {"provider", "url", "model", "dimension", "api_key_env"});
      read(e, "provider", c.embedding.provider);
      read(e, "url", c.embedding.url);
      read(e, "model", c.embedding.model);
      read_positive(e, "dimension", c.embedding.dimension);
      read(e, "api_key_env", c.embedding.api_key_env);
    }
    if (doc.contains("llm")) {
      const auto& l = doc.at("llm");
      check_keys(l, "llm",
                 {"url", "model", "api_key_env", "native_tools", "timeout_s", "max_retries", "temperature"});
      read(l, "url", c.llm.url);
      read(l, "model", c.llm.model);
      read(l, "api_key_env", c.llm.api_key_env);
      read(l, "native_tools", c.llm.native_tools);
      read(l, "timeout_s", c.llm.timeout_s);
      read(l, "max_retries", c.llm.max_retries);
      read(l, "temperature", c.llm.temperature);
    }
    if (doc.contains("defaults")) {
      const auto& d = doc.at("defaults");
      check_keys(d, "defaults", {"w_s", "w_e", "scale", "max_turns", "max_iterations", "max_attempts", "workers"});
      read(d, "w_s", c.defaults.w_s);
      read(d, "w_e", c.defaults.w_e);
      read_positive(d, "scale", c.defaults.scale);
      read_positive(d, "max_turns", c.defaults.max_turns);
      read_positive(d, "max_iterations", c.defaults.max_iterations);
      read_positive(d, "max_attempts", c.defaults.max_attempts);
      read_positive(d, "workers", c.defaults.workers);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (c.defaults.w_s < 0 || c.defaults.w_e < 0 || c.defaults.w_s + c.defaults.w_e <= 0) {
    throw ConfigError("default fusion weights must be non-negative and not both zero");
  }
  if (c.embedding.provider != "hash" && c.embedding.provider != "http") {
    throw ConfigError("unknown embedding provider '" + c.embedding.provider + "' (hash or http)");
  }
  return c;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingSettings& settings) {
  if (settings.provider == "hash") return std::make_unique<HashingEmbedder>(settings.dimension);
  if (settings.provider != "http") throw ConfigError("unknown embedding provider '" + settings.provider + "'");
  if (settings.url.empty()) throw ConfigError("embedding.url is required for the http provider");
  HttpEmbeddingConfig hc;
  hc.url = settings.url;
  hc.model = settings.model;
  hc.dimension = settings.dimension;
  hc.api_key = env_or_empty(settings.api_key_env);
  return std::make_unique<HttpEmbeddingProvider>(std::move(hc));
}

EngineOptions engine_options(const Config& config) {
  EngineOptions o;
  o.defaults.w_s = config.defaults.w_s;
  o.defaults.w_e = config.defaults.w_e;
  o.defaults.scale_n = config.defaults.scale;
  return o;
}

AgentConfig agent_config(const Config& config) {
  AgentConfig a;
  a.max_turns = config.defaults.max_turns;
  a.chat.temperature = config.llm.temperature;
  return a;
}

WorkflowConfig workflow_config(const Config& config) {
  WorkflowConfig w;
  w.max_iterations = config.defaults.max_iterations;
  w.max_attempts = config.defaults.max_attempts;
  w.chat.temperature = config.llm.temperature;
  return w;
}

HttpChatConfig chat_config(const Config& config, std::string_view url, std::string_view model) {
  HttpChatConfig h;
  h.url = url.empty() ? config.llm.url : std::string(url);
  h.model = model.empty() ? config.llm.model : std::string(model);
  if (h.url.empty()) throw ConfigError("no chat endpoint: set llm.url in the config or pass one on the command line");
  h.api_key_env = config.llm.api_key_env;
  h.timeout = std::chrono::seconds(config.llm.timeout_s);
  h.max_retries = config.llm.max_retries;
  h.native_tools = config.llm.native_tools;
  return h;
}

}  // namespace cie
