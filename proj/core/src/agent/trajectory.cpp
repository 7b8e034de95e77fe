#include "cie/agent/trajectory.hpp"

#include <istream>
#include <ostream>

#include "cie/text.hpp"

namespace cie {

using oj = nlohmann::ordered_json;
using json = nlohmann::json;

oj action_to_json(const Action& a) {
  return oj{{"name", std::string(action_name(a))}, {"arguments", action_arguments(a)}};
}

Action action_from_json(const json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
    throw ProtocolError("action record needs a string 'name'");
  }
  const auto name = j["name"].get<std::string>();
  const auto args = j.value("arguments", json::object());
  if (name == "answer") {
    if (!args.contains("text") || !args["text"].is_string()) throw ProtocolError("answer needs 'text'");
    return Answer{args["text"].get<std::string>()};
  }
  return action_from_call(name, args);
}

oj step_to_json(const Step& s) {
  oj actions = oj::array();
  for (const auto& a : s.actions) actions.push_back(action_to_json(a));
  oj failures = oj::array();
  for (const auto& f : s.parse_failures) failures.push_back({{"reason", f.reason}, {"name", f.name}, {"raw", f.raw}});
  oj j{{"thought", s.thought}, {"assistant", s.assistant_text}, {"actions", std::move(actions)},
       {"parse_failures", std::move(failures)}};
  j["info"] = s.info ? oj(render_tool_response(*s.info)) : oj();
  if (s.user_note) j["user_note"] = *s.user_note;
  j["forced"] = s.forced;
  return j;
}

Step step_from_json(const json& j) {
  Step s;
  s.thought = j.at("thought").get<std::string>();
  s.assistant_text = j.at("assistant").get<std::string>();
  for (const auto& a : j.at("actions")) s.actions.push_back(action_from_json(a));
  for (const auto& f : j.at("parse_failures")) {
    s.parse_failures.push_back(
        {f.at("reason").get<std::string>(), f.at("name").get<std::string>(), f.at("raw").get<std::string>()});
  }
  if (!j.at("info").is_null()) s.info = parse_tool_response(j.at("info").get<std::string>());
  if (j.contains("user_note")) s.user_note = j.at("user_note").get<std::string>();
  s.forced = j.value("forced", false);
  return s;
}

void write_trajectory_log(std::ostream& out, std::size_t episode, const Trajectory& t) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    oj rec{{"episode", episode}, {"question", t.question}, {"turn_cap", t.turn_cap}, {"step", i + 1}};
    const auto step = step_to_json(t.steps[i]);
    for (const auto& [k, v] : step.items()) rec[k] = v;
    if (i + 1 == t.steps.size() && t.final_answer) rec["final_answer"] = *t.final_answer;
    out << rec.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (t.abort_reason) {
    oj rec{{"episode", episode}, {"question", t.question}, {"turn_cap", t.turn_cap}, {"aborted", *t.abort_reason}};
    out << rec.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<Trajectory> read_trajectory_log(std::istream& in) {
  std::vector<Trajectory> out;
  std::optional<std::size_t> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto rec = json::parse(line);
      const auto episode = rec.at("episode").get<std::size_t>();
      if (!current || *current != episode) {
        out.emplace_back();
        out.back().question = rec.at("question").get<std::string>();
        out.back().turn_cap = rec.at("turn_cap").get<std::size_t>();
        current = episode;
      }
      auto& t = out.back();
      if (rec.contains("aborted")) {
        t.abort_reason = rec["aborted"].get<std::string>();
        continue;
      }
      if (rec.at("step").get<std::size_t>() != t.steps.size() + 1) throw LoadError("steps out of order");
      t.steps.push_back(step_from_json(rec));
      if (rec.contains("final_answer")) t.final_answer = rec["final_answer"].get<std::string>();
    } catch (const json::exception& e) {
      throw LoadError("trajectory log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ProtocolError& e) {
      throw LoadError("trajectory log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const LoadError& e) {
      throw LoadError("trajectory log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cie
