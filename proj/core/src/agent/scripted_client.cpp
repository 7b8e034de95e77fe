#include "cie/agent/scripted_client.hpp"

#include <fstream>
#include <sstream>

#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

ScriptedClient::ScriptedClient(std::vector<ScriptedTurn> turns, ExhaustPolicy policy)
    : turns_(std::move(turns)), policy_(policy) {}

ScriptedClient ScriptedClient::from_responses(std::vector<std::string> responses, ExhaustPolicy policy) {
  std::vector<ScriptedTurn> turns;
  for (auto& r : responses) turns.push_back({std::move(r), std::nullopt, std::nullopt});
  return ScriptedClient(std::move(turns), policy);
}

std::string ScriptedClient::complete(std::span<const Message> messages, const nlohmann::json* tools,
                                     const ChatOptions&) {
  const auto index = requests_.size();
  requests_.push_back({{messages.begin(), messages.end()}, tools != nullptr});
  if (turns_.empty() || (index >= turns_.size() && policy_ == ExhaustPolicy::kThrow)) {
    throw ClientError("script exhausted after " + std::to_string(turns_.size()) + " turn(s)", false);
  }
  const auto& turn = turns_[std::min(index, turns_.size() - 1)];
  if (turn.expect_system) {
    if (messages.empty() || messages.front().role != "system" ||
        messages.front().content.find(*turn.expect_system) == std::string::npos) {
      throw ClientError("turn " + std::to_string(index + 1) + ": system message lacks '" + *turn.expect_system + "'",
                        false);
    }
  }
  if (turn.expect_last) {
    if (messages.empty() || messages.back().content.find(*turn.expect_last) == std::string::npos) {
      throw ClientError("turn " + std::to_string(index + 1) + ": last message lacks '" + *turn.expect_last + "'",
                        false);
    }
  }
  return turn.response;
}

namespace {

ScriptedTurn turn_from(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>(), std::nullopt, std::nullopt};
  ScriptedTurn t;
  t.response = j.at("response").get<std::string>();
  if (j.contains("expect_system")) t.expect_system = j.at("expect_system").get<std::string>();
  if (j.contains("expect_last")) t.expect_last = j.at("expect_last").get<std::string>();
  return t;
}

}  // namespace

ScriptBook ScriptBook::parse(std::string_view jsonl) {
  ScriptBook book;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Script s;
      for (const auto& t : j.at("turns")) s.turns.push_back(turn_from(t));
      const auto policy = j.value("exhaust", std::string("throw"));
      if (policy == "repeat_last") {
        s.policy = ExhaustPolicy::kRepeatLast;
      } else if (policy != "throw") {
        throw LoadError("unknown exhaust policy '" + policy + "'");
      }
      book.scripts_[j.at("question").get<std::string>()] = std::move(s);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError("script line " + std::to_string(line_no) + ": " + e.what());
    } catch (const LoadError& e) {
      throw LoadError("script line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return book;
}

ScriptBook ScriptBook::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("cannot open script file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::unique_ptr<ScriptedClient> ScriptBook::client_for(const std::string& question) const {
  auto it = scripts_.find(question);
  if (it == scripts_.end()) throw NotFound("no script for question: " + question);
  return std::make_unique<ScriptedClient>(it->second.turns, it->second.policy);
}

}  // namespace cie
