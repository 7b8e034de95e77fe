#include "cie/agent/http_chat_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "../http_util.hpp"
#include "cie/engine/protocol.hpp"
#include "cie/error.hpp"

namespace cie {

using json = nlohmann::json;

namespace {

std::string native_call_to_text(const json& call) {
  const auto& fn = call.at("function");
  json args = json::object();
  const auto& raw = fn.value("arguments", json());
  if (raw.is_string()) {
    // Keep unparsable argument strings verbatim so the parser reports them.
    args = json::parse(raw.get<std::string>(), nullptr, false);
    if (args.is_discarded()) args = raw;
  } else if (!raw.is_null()) {
    args = raw;
  }
  json block{{"name", fn.at("name")}, {"arguments", args}};
  return std::string(kToolCallOpen) + "\n" + block.dump() + "\n" + std::string(kToolCallClose);
}

std::string reply_text(const json& body) {
  const auto& msg = body.at("choices").at(0).at("message");
  std::string out;
  if (msg.contains("reasoning_content") && msg["reasoning_content"].is_string()) {
    out += "<think>\n" + msg["reasoning_content"].get<std::string>() + "\n</think>\n";
  }
  if (msg.contains("content") && msg["content"].is_string()) out += msg["content"].get<std::string>();
  if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
    for (const auto& call : msg["tool_calls"]) {
      if (!out.empty()) out += '\n';
      out += native_call_to_text(call);
    }
  }
  return out;
}

}  // namespace

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw ConfigError("chat endpoint URL is empty");
  detail::split_url(config_.url);
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpChatClient::complete(std::span<const Message> messages, const json* tools,
                                     const ChatOptions& options) {
  json msgs = json::array();
  for (const auto& m : messages) {
    const bool as_user = m.role == "tool" && config_.tool_role_as_user;
    msgs.push_back({{"role", as_user ? "user" : m.role}, {"content", m.content}});
  }
  json body{{"model", config_.model}, {"messages", std::move(msgs)}, {"temperature", options.temperature}};
  if (options.max_tokens) body["max_tokens"] = *options.max_tokens;
  if (tools != nullptr && config_.native_tools) body["tools"] = *tools;
  const auto payload = body.dump();

  const auto url = detail::split_url(config_.url);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500) * (1 << (attempt - 1)));
    httplib::Client client(url.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    auto res = client.Post(url.path.empty() ? "/" : url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ClientError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body, false);
    }
    try {
      return reply_text(json::parse(res->body));
    } catch (const json::exception& e) {
      throw ClientError(std::string("malformed chat response: ") + e.what(), false);
    }
  }
  throw ClientError("chat request failed after retries: " + last_error, true);
}

}  // namespace cie
