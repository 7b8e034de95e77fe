#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "cie/engine/engine.hpp"

namespace cie {

/// Live engine sessions keyed by opaque id. Thread-safe; calls on the same
/// session are serialized.
class SessionRegistry {
 public:
  explicit SessionRegistry(const Engine& engine) : engine_(engine) {}

  std::string create();
  bool erase(const std::string& id);
  std::size_t size() const;

  /// Runs one suite. The body is either an array of {"name", "arguments"}
  /// objects or {"actions": [...]}; calls that do not convert to actions
  /// become error blocks. Throws NotFound for an unknown id and
  /// ProtocolError for a body of the wrong shape.
  ToolResponse submit(const std::string& id, const nlohmann::json& body);

  /// Throws NotFound.
  SessionSummary state(const std::string& id) const;

 private:
  struct Entry {
    std::mutex mu;
    EngineSession session;
    explicit Entry(const Engine& e) : session(e) {}
  };
  std::shared_ptr<Entry> find(const std::string& id) const;

  const Engine& engine_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

nlohmann::ordered_json session_summary_json(const SessionSummary& s);

/// HTTP front end:
///   GET    /tools                 tool schema document
///   POST   /session               {"session_id", "session"}
///   POST   /session/{id}/suite    action list in, tool response out
///   GET    /session/{id}/state    session summary
///   DELETE /session/{id}
class Server {
 public:
  explicit Server(const Engine& engine);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Blocks until stop(). Throws Error when the address cannot be bound.
  void listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  void listen_after_bind();
  void stop();

  SessionRegistry& registry() noexcept { return registry_; }

 private:
  struct Impl;
  SessionRegistry registry_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cie
