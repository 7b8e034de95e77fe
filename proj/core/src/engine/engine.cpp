#include "cie/engine/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <sstream>

#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

namespace {

constexpr std::size_t kRawExcerpt = 200;

ActionBlock error_block(const Action& a, const std::string& message) {
  ActionBlock b;
  b.tool = std::string(action_name(a));
  b.arguments = action_arguments(a);
  b.status = BlockStatus::kError;
  b.message = message;
  return b;
}

ActionBlock failure_block(const ParseFailure& f) {
  ActionBlock b;
  b.tool = f.name.empty() ? "unknown" : f.name;
  b.status = BlockStatus::kError;
  b.message = f.reason;
  if (!f.raw.empty()) {
    b.message += ": ";
    b.message += f.raw.substr(0, kRawExcerpt);
    if (f.raw.size() > kRawExcerpt) b.message += "...";
  }
  return b;
}

std::string format_weight(double w) {
  std::ostringstream out;
  out << w;
  return out.str();
}

// Keeps each chunk only in the block where its fused score is highest
// (earliest block on ties).
void dedupe_across_blocks(std::vector<ActionBlock>& blocks) {
  std::map<std::string, std::pair<double, std::size_t>> best;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    for (const auto& c : blocks[bi].results) {
      auto [it, inserted] = best.try_emplace(c.chunk_id, c.fused_score, bi);
      if (!inserted && c.fused_score > it->second.first) it->second = {c.fused_score, bi};
    }
  }
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    std::erase_if(blocks[bi].results, [&](const ScoredChunk& c) { return best.at(c.chunk_id).second != bi; });
  }
}

}  // namespace

Engine::Engine(const Corpus& corpus, const SparseIndex& sparse, const DenseIndex& dense,
               const EmbeddingProvider& provider, EngineOptions options)
    : corpus_(corpus), sparse_(sparse), dense_(dense), provider_(provider), options_(std::move(options)) {
  if (sparse_.size() != corpus_.chunks().size() || dense_.size() != corpus_.chunks().size()) {
    throw IndexFormatError("indexes do not cover the corpus; rebuild them");
  }
}

ChunkFilter Engine::resolve_candidates(const SessionState& session) const {
  std::unordered_set<std::string> banned;
  for (const auto& doc : session.excluded) {
    for (const auto& id : corpus_.chunks_of(doc)) banned.insert(id);
  }
  return ChunkFilter::except(std::move(banned));
}

std::set<std::string> Engine::candidate_ids(const SessionState& session) const {
  const auto filter = resolve_candidates(session);
  std::set<std::string> out;
  for (const auto& c : corpus_.chunks()) {
    if (filter.allows(c.chunk_id)) out.insert(c.chunk_id);
  }
  return out;
}

void Engine::hydrate(std::vector<ScoredChunk>& chunks) const {
  for (auto& c : chunks) {
    const auto& stored = corpus_.get_chunk(c.chunk_id);
    c.doc_id = stored.doc_id;
    c.text = stored.text;
  }
}

std::vector<ScoredChunk> Engine::run_search(const SessionState& session, const Action& action,
                                            const ChunkFilter& filter, std::size_t n) const {
  std::vector<ScoredChunk> out;
  if (const auto* s = std::get_if<SemanticSearch>(&action)) {
    const auto hits = dense_.semantic_search(provider_, s->query, kFusionDepth, filter);
    out = apply_fusion(hits, {}, session.w_s, session.w_e, n);
  } else if (const auto* e = std::get_if<ExactSearch>(&action)) {
    const auto hits = sparse_.exact_search(e->keywords, kFusionDepth, filter);
    out = apply_fusion({}, hits, session.w_s, session.w_e, n);
  }
  hydrate(out);
  return out;
}

std::vector<ScoredChunk> Engine::guaranteed_chunks(const SessionState& session, const Action& retrieval,
                                                   std::vector<ScoredChunk> results) const {
  const bool semantic = std::holds_alternative<SemanticSearch>(retrieval);
  if (!semantic && !std::holds_alternative<ExactSearch>(retrieval)) return results;
  for (auto doc = session.included.rbegin(); doc != session.included.rend(); ++doc) {
    const auto& ids = corpus_.chunks_of(*doc);
    if (ids.empty()) continue;
    auto best = run_search(session, retrieval, ChunkFilter::only({ids.begin(), ids.end()}), 1);
    ScoredChunk pick;
    if (!best.empty()) {
      pick = std::move(best.front());
    } else {
      // Nothing in the document matched; surface its opening chunk.
      pick.chunk_id = ids.front();
      if (semantic) pick.semantic_score = 0.0;
      else pick.exact_score = 0.0;
      std::vector<ScoredChunk> one{pick};
      hydrate(one);
      pick = std::move(one.front());
    }
    const bool present = std::any_of(results.begin(), results.end(),
                                     [&](const ScoredChunk& c) { return c.chunk_id == pick.chunk_id; });
    if (present) continue;
    pick.provenance = pick.provenance | Provenance::kIncluded;
    results.insert(results.begin(), std::move(pick));
  }
  return results;
}

ActionBlock Engine::retrieve(const SessionState& session, const Action& action) const {
  ActionBlock block;
  block.tool = std::string(action_name(action));
  block.arguments = action_arguments(action);
  block.retrieval = true;
  const auto filter = resolve_candidates(session);
  if (const auto* em = std::get_if<EntityMatch>(&action)) {
    if (text::trim(em->entity).empty()) throw InvalidParameter("entity must be non-empty");
    for (auto& hit : sparse_.entity_match(em->entity, em->query, filter, session.scale_n)) {
      ScoredChunk c;
      c.chunk_id = std::move(hit.hit.chunk_id);
      c.exact_score = hit.hit.bm25_score;
      c.fused_score = hit.hit.bm25_score;
      c.provenance = Provenance::kEntity;
      c.snippets = std::move(hit.snippets);
      block.results.push_back(std::move(c));
    }
    hydrate(block.results);
    if (block.results.empty()) block.message = "no chunk contains the entity";
    return block;
  }
  block.results = guaranteed_chunks(session, action, run_search(session, action, filter, session.scale_n));
  return block;
}

ActionOutcome Engine::execute_action(SessionState session, const Action& action) const {
  ActionOutcome out;
  out.block.tool = std::string(action_name(action));
  out.block.arguments = action_arguments(action);

  if (const auto* w = std::get_if<WeightedFusion>(&action)) {
    if (!std::isfinite(w->w_s) || !std::isfinite(w->w_e) || w->w_s < 0.0 || w->w_e < 0.0 ||
        !(w->w_s + w->w_e > 0.0)) {
      throw InvalidParameter("weighted_fusion needs w_s >= 0, w_e >= 0 and w_s + w_e > 0");
    }
    session.w_s = w->w_s;
    session.w_e = w->w_e;
    out.block.message = "fusion weights set to w_s=" + format_weight(w->w_s) + ", w_e=" + format_weight(w->w_e);
  } else if (const auto* s = std::get_if<AdjustScale>(&action)) {
    if (s->n < 1) throw InvalidParameter("adjust_scale needs n >= 1");
    session.scale_n = static_cast<std::size_t>(s->n);
    out.block.message = "result scale set to " + std::to_string(s->n);
  } else if (std::holds_alternative<IncludeDocs>(action) || std::holds_alternative<ExcludeDocs>(action)) {
    const bool include = std::holds_alternative<IncludeDocs>(action);
    const auto& ids = include ? std::get<IncludeDocs>(action).doc_ids : std::get<ExcludeDocs>(action).doc_ids;
    std::vector<std::string> unknown;
    std::size_t applied = 0;
    for (const auto& id : ids) {
      if (!corpus_.has_document(id)) {
        unknown.push_back(id);
        continue;
      }
      include ? session.include(id) : session.exclude(id);
      ++applied;
    }
    out.block.message = std::to_string(applied) + (include ? " document(s) included" : " document(s) excluded");
    if (ids.empty()) {
      out.block.status = BlockStatus::kWarning;
      out.block.message = "no doc_ids given";
    } else if (!unknown.empty()) {
      out.block.status = BlockStatus::kWarning;
      out.block.message += "; unknown doc_id(s):";
      for (const auto& u : unknown) out.block.message += " " + u;
    }
  } else if (const auto* ans = std::get_if<Answer>(&action)) {
    out.terminal = true;
    out.block.message = "final answer recorded";
    (void)ans;
  } else {
    out.block = retrieve(session, action);
  }
  out.state = std::move(session);
  return out;
}

SuiteOutcome Engine::execute_suite(SessionState session, std::span<const Action> actions) const {
  if (actions.empty()) throw ProtocolError("empty action suite");
  const bool has_answer = std::any_of(actions.begin(), actions.end(), [](const Action& a) { return is_answer(a); });
  if (has_answer && actions.size() > 1) throw ProtocolError("answer cannot be combined with other actions");

  SuiteOutcome out;
  if (has_answer) {
    auto r = execute_action(std::move(session), actions.front());
    out.answer = std::get<Answer>(actions.front()).text;
    out.state = std::move(r.state);
    out.response.blocks.push_back(std::move(r.block));
    out.response.session = SessionSummary::of(out.state);
    return out;
  }

  std::vector<ActionBlock> blocks(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!is_state_mutation(actions[i])) continue;
    try {
      auto r = execute_action(session, actions[i]);
      session = std::move(r.state);
      blocks[i] = std::move(r.block);
    } catch (const Error& e) {
      blocks[i] = error_block(actions[i], e.what());
    }
  }

  auto run_one = [&](const Action& a) -> ActionBlock {
    try {
      return retrieve(session, a);
    } catch (const EmbeddingError& e) {
      return error_block(a, std::string(e.what()) + (e.retryable() ? " (retryable)" : ""));
    } catch (const Error& e) {
      return error_block(a, e.what());
    }
  };
  std::vector<std::size_t> retrievals;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (is_retrieval(actions[i])) retrievals.push_back(i);
  }
  if (options_.parallel_retrieval && retrievals.size() > 1) {
    std::vector<std::future<ActionBlock>> pending;
    pending.reserve(retrievals.size());
    for (auto i : retrievals) pending.push_back(std::async(std::launch::async, run_one, std::cref(actions[i])));
    for (std::size_t j = 0; j < retrievals.size(); ++j) blocks[retrievals[j]] = pending[j].get();
  } else {
    for (auto i : retrievals) blocks[i] = run_one(actions[i]);
  }

  dedupe_across_blocks(blocks);
  out.state = std::move(session);
  out.response.blocks = std::move(blocks);
  out.response.session = SessionSummary::of(out.state);
  return out;
}

SuiteOutcome Engine::respond(SessionState session, const ParsedCalls& calls) const {
  SuiteOutcome out;
  if (calls.empty()) {
    ActionBlock b;
    b.tool = "none";
    b.status = BlockStatus::kError;
    b.message = "no tool call found";
    out.response.blocks.push_back(std::move(b));
    out.response.session = SessionSummary::of(session);
    out.state = std::move(session);
    return out;
  }
  const auto actions = calls.actions();
  std::vector<ActionBlock> executed;
  if (!actions.empty()) {
    try {
      auto r = execute_suite(session, actions);
      session = std::move(r.state);
      executed = std::move(r.response.blocks);
      out.answer = std::move(r.answer);
    } catch (const ProtocolError& e) {
      ActionBlock b;
      b.tool = "suite";
      b.status = BlockStatus::kError;
      b.message = e.what();
      out.response.blocks.push_back(std::move(b));
      out.response.session = SessionSummary::of(session);
      out.state = std::move(session);
      return out;
    }
  }
  std::size_t next = 0;
  for (const auto& c : calls.calls) {
    if (const auto* f = std::get_if<ParseFailure>(&c)) {
      out.response.blocks.push_back(failure_block(*f));
    } else {
      out.response.blocks.push_back(std::move(executed[next++]));
    }
  }
  out.response.session = SessionSummary::of(session);
  out.state = std::move(session);
  return out;
}

ToolResponse EngineSession::submit(const ParsedCalls& calls) {
  auto r = engine_->respond(state_, calls);
  state_ = std::move(r.state);
  return std::move(r.response);
}

ToolResponse EngineSession::submit(std::span<const Action> actions) {
  auto r = engine_->execute_suite(state_, actions);
  state_ = std::move(r.state);
  return std::move(r.response);
}

}  // namespace cie
