#pragma once

#include <chrono>
#include <string>

#include "cie/agent/chat.hpp"

namespace cie {

struct HttpChatConfig {
  std::string url;  // full endpoint, e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string api_key_env = "CIE_LLM_API_KEY";  // read at construction; unset means no auth header
  std::chrono::seconds timeout{120};
  int max_retries = 3;
  bool native_tools = true;        // send the tools array in the request
  bool tool_role_as_user = true;   // send tool results as user messages
};

/// OpenAI-compatible chat completions client. Native `tool_calls` in the
/// reply are rewritten as `<tool_call>` blocks and `reasoning_content` as a
/// `<think>` block, so callers see one text format. Transport errors, 429
/// and 5xx are retried with exponential backoff. Stateless after
/// construction, so one instance may serve several threads.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatConfig config);

  std::string complete(std::span<const Message> messages, const nlohmann::json* tools,
                       const ChatOptions& options) override;
  bool deterministic() const noexcept override { return false; }

 private:
  HttpChatConfig config_;
  std::string api_key_;
};

}  // namespace cie
