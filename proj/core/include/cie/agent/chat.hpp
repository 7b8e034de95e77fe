#pragma once

#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace cie {

/// One chat message. Roles: "system", "user", "assistant", "tool".
struct Message {
  std::string role;
  std::string content;

  bool operator==(const Message&) const = default;
};

struct ChatOptions {
  double temperature = 0.0;
  std::optional<int> max_tokens;
};

/// Chat-model backend. `tools` is the OpenAI-style tools array, or null when
/// tool use is disabled for this turn. Returns the assistant text with tool
/// calls in `<tool_call>` form. Throws ClientError.
class ChatClient {
 public:
  virtual ~ChatClient() = default;

  virtual std::string complete(std::span<const Message> messages, const nlohmann::json* tools,
                               const ChatOptions& options) = 0;

  /// True when the same requests always yield the same responses.
  virtual bool deterministic() const noexcept = 0;
};

}  // namespace cie
