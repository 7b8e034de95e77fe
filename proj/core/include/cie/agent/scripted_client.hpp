#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cie/agent/chat.hpp"

namespace cie {

/// One canned reply. The optional expectations are substrings the request
/// must contain (system message, last message); a mismatch throws
/// ClientError so the episode aborts visibly.
struct ScriptedTurn {
  std::string response;
  std::optional<std::string> expect_system;
  std::optional<std::string> expect_last;

  bool operator==(const ScriptedTurn&) const = default;
};

enum class ExhaustPolicy { kThrow, kRepeatLast };

/// Plays back replies by turn index. Not thread-safe; use one per episode.
class ScriptedClient final : public ChatClient {
 public:
  struct Request {
    std::vector<Message> messages;
    bool tools_offered = false;
  };

  explicit ScriptedClient(std::vector<ScriptedTurn> turns, ExhaustPolicy policy = ExhaustPolicy::kThrow);
  static ScriptedClient from_responses(std::vector<std::string> responses,
                                       ExhaustPolicy policy = ExhaustPolicy::kThrow);

  std::string complete(std::span<const Message> messages, const nlohmann::json* tools,
                       const ChatOptions& options) override;
  bool deterministic() const noexcept override { return true; }

  std::size_t turns_used() const noexcept { return requests_.size(); }
  const std::vector<Request>& requests() const noexcept { return requests_; }

 private:
  std::vector<ScriptedTurn> turns_;
  ExhaustPolicy policy_;
  std::vector<Request> requests_;
};

/// Scripts keyed by question text, read from line-delimited JSON:
///   {"question": "...", "turns": ["reply", {"response": "...", "expect_system": "..."}],
///    "exhaust": "throw" | "repeat_last"}
class ScriptBook {
 public:
  static ScriptBook load(const std::filesystem::path& file);
  static ScriptBook parse(std::string_view jsonl);

  bool contains(const std::string& question) const { return scripts_.contains(question); }
  std::size_t size() const noexcept { return scripts_.size(); }

  /// Fresh client for one episode. Throws NotFound.
  std::unique_ptr<ScriptedClient> client_for(const std::string& question) const;

 private:
  struct Script {
    std::vector<ScriptedTurn> turns;
    ExhaustPolicy policy = ExhaustPolicy::kThrow;
  };
  std::map<std::string, Script> scripts_;
};

}  // namespace cie
