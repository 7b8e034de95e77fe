#include <gtest/gtest.h>

#include <sstream>

#include "cie/agent/agent.hpp"
#include "cie/agent/prompts.hpp"
#include "cie/agent/scripted_client.hpp"
#include "cie/agent/trajectory.hpp"
#include "cie/error.hpp"
#include "support/toy_world.hpp"

namespace cie {
namespace {

const std::string kSearch =
    "<think>\nlook it up\n</think>\n<tool_call>\n{\"name\": \"semantic_search\", \"arguments\": {\"query\": "
    "\"shark film\"}}\n</tool_call>";

std::string answer_turn(const std::string& thought, const std::string& answer) {
  return "<think>\n" + thought + "\n</think>\n" + answer;
}

TEST(AgentText, ExtractAnswer) {
  EXPECT_EQ(extract_answer("<think>reasoning</think>Miami, Florida"), "Miami, Florida");
  EXPECT_EQ(extract_answer("  1976 \n"), "1976");
  EXPECT_EQ(extract_answer(kSearch), std::nullopt);
  EXPECT_EQ(extract_answer("<think>only thinking</think>"), std::nullopt);
  EXPECT_EQ(extract_answer(""), std::nullopt);
}

TEST(AgentText, ExtractThought) {
  EXPECT_EQ(extract_thought(kSearch), "look it up");
  EXPECT_EQ(extract_thought("I will search.\n<tool_call>{}</tool_call>"), "I will search.");
  EXPECT_EQ(extract_thought("<tool_call>{}</tool_call>"), "");
}

TEST(AgentText, StripThinkAndTrailing) {
  EXPECT_EQ(strip_think("a<think>b</think>c"), "ac");
  EXPECT_EQ(strip_think("a<think>unclosed"), "a");
  EXPECT_EQ(strip_think("stray</think>rest"), "rest");
  EXPECT_EQ(trailing_text(kSearch + "\nJaws"), "Jaws");
  EXPECT_EQ(trailing_text(kSearch), "");
}

TEST(AgentText, RenderMessagesShape) {
  Trajectory t;
  t.question = "q?";
  auto m = render_messages(t, "SYS");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].role, "system");
  EXPECT_EQ(m[0].content, "SYS");
  EXPECT_EQ(m[1].role, "user");
  EXPECT_EQ(m[1].content, "q?");

  Step s;
  s.thought = "t";
  s.assistant_text = kSearch;
  s.actions = {SemanticSearch{"shark film"}};
  s.info = ToolResponse{};
  t.steps.push_back(s);
  m = render_messages(t, "SYS");
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[2].role, "assistant");
  EXPECT_EQ(m[2].content, kSearch);
  EXPECT_EQ(m[3].role, "tool");
  EXPECT_EQ(m[3].content, render_tool_response(*s.info));
  EXPECT_EQ(render_messages(t, "SYS"), m);
}

TEST(Agent, SearchThenAnswer) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch, answer_turn("it is Jaws", "Jaws")});
  EngineSession session(*w->engine);
  auto t = run_agent("Which shark film?", client, session);
  ASSERT_EQ(t.steps.size(), 2u);
  EXPECT_EQ(t.final_answer, "Jaws");
  EXPECT_EQ(t.steps[0].actions, std::vector<Action>{SemanticSearch{"shark film"}});
  ASSERT_TRUE(t.steps[0].info.has_value());
  EXPECT_FALSE(t.steps[0].info->blocks.at(0).results.empty());
  EXPECT_EQ(t.steps[1].actions, std::vector<Action>{Answer{"Jaws"}});
  EXPECT_FALSE(t.steps[1].info.has_value());
  EXPECT_EQ(t.steps[1].thought, "it is Jaws");
  EXPECT_FALSE(t.abort_reason.has_value());
}

TEST(Agent, RequestsAreAppendOnly) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch, kSearch, kSearch, answer_turn("done", "Jaws")});
  EngineSession session(*w->engine);
  auto t = run_agent("Which shark film?", client, session);
  const auto& reqs = client.requests();
  ASSERT_EQ(reqs.size(), 4u);
  for (std::size_t i = 0; i + 1 < reqs.size(); ++i) {
    const auto& a = reqs[i].messages;
    const auto& b = reqs[i + 1].messages;
    ASSERT_EQ(b.size(), a.size() + 2);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    EXPECT_TRUE(reqs[i].tools_offered);
  }
  EXPECT_EQ(reqs[0].messages[0].content, prompt_text("agent_system"));
}

TEST(Agent, TurnCapForcesFinalization) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch}, ExhaustPolicy::kRepeatLast);
  EngineSession session(*w->engine);
  auto t = run_agent("Which shark film?", client, session);
  ASSERT_EQ(t.steps.size(), 8u);
  EXPECT_EQ(client.turns_used(), 8u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_FALSE(t.steps[i].forced);
  const auto& last = t.steps.back();
  EXPECT_TRUE(last.forced);
  ASSERT_TRUE(last.user_note.has_value());
  EXPECT_EQ(*last.user_note, prompt_text("finalize"));
  EXPECT_FALSE(client.requests().back().tools_offered);
  EXPECT_EQ(client.requests().back().messages.back().content, prompt_text("finalize"));
  // The repeated reply is all tool calls and thinking, so nothing is left as an answer.
  EXPECT_FALSE(t.final_answer.has_value());
}

TEST(Agent, CustomTurnCap) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch, kSearch, "Jaws"});
  EngineSession session(*w->engine);
  AgentConfig cfg;
  cfg.max_turns = 2;
  auto t = run_agent("q", client, session, cfg);
  EXPECT_EQ(t.turn_cap, 2u);
  ASSERT_EQ(t.steps.size(), 3u);
  EXPECT_TRUE(t.steps.back().forced);
  EXPECT_EQ(t.final_answer, "Jaws");
  cfg.max_turns = 0;
  EXPECT_THROW(run_agent("q", client, session, cfg), InvalidParameter);
}

TEST(Agent, MalformedCallThenRecovery) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses(
      {"<think>try</think><tool_call>{\"name\": \"semantic_search\", \"arguments\": {\"query\": </tool_call>",
       "<think>fix it</think><tool_call>{\"name\": \"teleport\", \"arguments\": {}}</tool_call>", kSearch,
       answer_turn("ok", "Jaws")});
  EngineSession session(*w->engine);
  auto t = run_agent("q", client, session);
  ASSERT_EQ(t.steps.size(), 4u);
  ASSERT_EQ(t.steps[0].parse_failures.size(), 1u);
  EXPECT_TRUE(t.steps[0].info->has_errors());
  ASSERT_EQ(t.steps[1].parse_failures.size(), 1u);
  EXPECT_EQ(t.steps[1].parse_failures[0].reason, "unknown tool");
  EXPECT_EQ(t.steps[1].info->blocks.at(0).status, BlockStatus::kError);
  EXPECT_FALSE(t.steps[2].info->has_errors());
  EXPECT_EQ(t.final_answer, "Jaws");
}

TEST(Agent, AnswerMixedWithCallsIsRejected) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch + "\nJaws", answer_turn("ok", "Jaws")});
  EngineSession session(*w->engine);
  auto t = run_agent("q", client, session);
  ASSERT_EQ(t.steps.size(), 2u);
  ASSERT_TRUE(t.steps[0].info.has_value());
  EXPECT_TRUE(t.steps[0].info->has_errors());
  EXPECT_EQ(t.final_answer, "Jaws");
}

TEST(Agent, IdleTurnsAbort) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({"<think>hmm</think>", "<think>still thinking</think>"});
  EngineSession session(*w->engine);
  try {
    run_agent("q", client, session);
    FAIL() << "expected TrajectoryAborted";
  } catch (const TrajectoryAborted& e) {
    EXPECT_EQ(e.partial().steps.size(), 2u);
    EXPECT_TRUE(e.partial().abort_reason.has_value());
  }
}

TEST(Agent, SingleIdleTurnRecovers) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({"<think>hmm</think>", answer_turn("ok", "Jaws")});
  EngineSession session(*w->engine);
  auto t = run_agent("q", client, session);
  ASSERT_EQ(t.steps.size(), 2u);
  ASSERT_TRUE(t.steps[0].info.has_value());
  EXPECT_EQ(t.final_answer, "Jaws");
}

TEST(Agent, ClientFailureAbortsWithPartial) {
  auto w = testing::film_world();
  auto client = ScriptedClient::from_responses({kSearch});
  EngineSession session(*w->engine);
  try {
    run_agent("q", client, session);
    FAIL() << "expected TrajectoryAborted";
  } catch (const TrajectoryAborted& e) {
    EXPECT_EQ(e.partial().steps.size(), 1u);
    EXPECT_EQ(e.partial().question, "q");
  }
}

TEST(ScriptedClient, Expectations) {
  ScriptedClient c({ScriptedTurn{"hi", std::string("SYS"), std::string("question")}});
  std::vector<Message> good{{"system", "SYS prompt"}, {"user", "the question"}};
  EXPECT_EQ(c.complete(good, nullptr, {}), "hi");
  EXPECT_THROW(c.complete(good, nullptr, {}), ClientError);

  ScriptedClient d({ScriptedTurn{"hi", std::string("PLANNER"), std::nullopt}});
  EXPECT_THROW(d.complete(good, nullptr, {}), ClientError);
}

TEST(ScriptBook, LoadsFilmScripts) {
  auto book = ScriptBook::load(testing::data_dir() / "film_scripts.jsonl");
  EXPECT_EQ(book.size(), 6u);
  EXPECT_TRUE(book.contains("Who directed Failure to Launch?"));
  EXPECT_THROW(book.client_for("unknown"), NotFound);
  EXPECT_THROW(ScriptBook::parse("{\"question\": 1}\n"), LoadError);
}

TEST(Agent, FilmScriptsAnswerCorrectly) {
  auto w = testing::film_world();
  auto book = ScriptBook::load(testing::data_dir() / "film_scripts.jsonl");
  const std::vector<std::pair<std::string, std::string>> cases{
      {"Which film was released first, The Jaws of Death or Failure to Launch?", "The Jaws of Death"},
      {"When was The Jaws of Death released?", "1976"},
      {"Who directed Failure to Launch?", "Tom Dey"},
      {"Where was the director of the film Polish-Russian War born?", "Warsaw"},
      {"Who wrote The Hound of Death?", "Agatha Christie"}};
  for (const auto& [q, a] : cases) {
    auto client = book.client_for(q);
    EngineSession session(*w->engine);
    auto t = run_agent(q, *client, session);
    EXPECT_EQ(t.final_answer, a) << q;
    for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
      ASSERT_TRUE(t.steps[i].info.has_value()) << q;
      EXPECT_FALSE(t.steps[i].info->has_errors()) << q << " step " << i;
    }
  }
}

TEST(Agent, DistractorExcludedThenAnchored) {
  auto w = testing::film_world();
  auto book = ScriptBook::load(testing::data_dir() / "film_scripts.jsonl");
  const std::string q = "When was The Jaws of Death released?";
  auto client = book.client_for(q);
  EngineSession session(*w->engine);
  auto t = run_agent(q, *client, session);
  ASSERT_EQ(t.steps.size(), 3u);
  const auto& first = t.steps[0].info->blocks.at(0).results;
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(first[0].doc_id, "hound_of_death");
  for (const auto& b : t.steps[1].info->blocks) {
    for (const auto& r : b.results) EXPECT_NE(r.doc_id, "hound_of_death");
  }
  const auto& anchored = t.steps[1].info->blocks.back().results;
  ASSERT_FALSE(anchored.empty());
  EXPECT_EQ(anchored[0].doc_id, "jaws_of_death");
  EXPECT_TRUE(session.state().excluded.contains("hound_of_death"));
}

TEST(TrajectoryLog, RoundTrip) {
  auto w = testing::film_world();
  auto book = ScriptBook::load(testing::data_dir() / "film_scripts.jsonl");
  std::vector<Trajectory> ts;
  for (const std::string q : {"Who directed Failure to Launch?", "When was The Jaws of Death released?"}) {
    auto client = book.client_for(q);
    EngineSession session(*w->engine);
    ts.push_back(run_agent(q, *client, session));
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < ts.size(); ++i) write_trajectory_log(out, i + 1, ts[i]);
  std::istringstream in(out.str());
  auto back = read_trajectory_log(in);
  ASSERT_EQ(back.size(), ts.size());
  std::ostringstream again;
  for (std::size_t i = 0; i < back.size(); ++i) write_trajectory_log(again, i + 1, back[i]);
  EXPECT_EQ(again.str(), out.str());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(back[i].question, ts[i].question);
    EXPECT_EQ(back[i].final_answer, ts[i].final_answer);
    EXPECT_EQ(back[i].steps.size(), ts[i].steps.size());
  }
}

TEST(TrajectoryLog, AbortedEpisodeKeepsReason) {
  Trajectory t;
  t.question = "q";
  Step s;
  s.thought = "x";
  s.assistant_text = "<think>x</think>";
  s.info = ToolResponse{};
  t.steps.push_back(s);
  t.abort_reason = "client failure";
  std::ostringstream out;
  write_trajectory_log(out, 3, t);
  std::istringstream in(out.str());
  auto back = read_trajectory_log(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].abort_reason, "client failure");
  std::istringstream bad("{\"episode\": 1}\nnot json\n");
  EXPECT_THROW(read_trajectory_log(bad), LoadError);
}

}  // namespace
}  // namespace cie
