#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cie/chunk_filter.hpp"
#include "cie/corpus.hpp"
#include "cie/dense_index.hpp"
#include "cie/embedding.hpp"
#include "cie/engine/action.hpp"
#include "cie/engine/fusion.hpp"
#include "cie/engine/protocol.hpp"
#include "cie/engine/session.hpp"
#include "cie/engine/tool_response.hpp"
#include "cie/sparse_index.hpp"

namespace cie {

struct EngineOptions {
  SessionState defaults;
  /// Run the retrieval actions of one suite on separate threads.
  bool parallel_retrieval = true;
};

struct ActionOutcome {
  SessionState state;
  ActionBlock block;
  bool terminal = false;  // Answer
};

struct SuiteOutcome {
  SessionState state;
  ToolResponse response;
  std::optional<std::string> answer;
};

/// The corpus interaction engine: executes the seven primitives against a
/// session. Holds references only; the corpus, indexes and provider must
/// outlive it. All members are const and safe to call concurrently for
/// different sessions.
class Engine {
 public:
  Engine(const Corpus& corpus, const SparseIndex& sparse, const DenseIndex& dense,
         const EmbeddingProvider& provider, EngineOptions options = {});

  SessionState new_session() const { return options_.defaults; }

  const Corpus& corpus() const noexcept { return corpus_; }

  /// Every chunk except those of excluded documents.
  ChunkFilter resolve_candidates(const SessionState& session) const;

  /// resolve_candidates materialized over the corpus universe.
  std::set<std::string> candidate_ids(const SessionState& session) const;

  /// For each included document whose best chunk (under `retrieval`, scored
  /// by fused score within that document) is missing from `results`, prepends
  /// that chunk. Included documents are processed so that the first included
  /// id ends up first. A no-op for non-search actions.
  std::vector<ScoredChunk> guaranteed_chunks(const SessionState& session, const Action& retrieval,
                                             std::vector<ScoredChunk> results) const;

  /// Applies one action. Throws InvalidParameter for out-of-range parameters
  /// and EmptyQuery / EmbeddingError from the retrievers.
  ActionOutcome execute_action(SessionState session, const Action& action) const;

  /// Mutations first (list order), then retrievals against the resulting
  /// state; blocks come back in list order with cross-block duplicates kept
  /// only where their fused score is highest. Per-action failures become
  /// error blocks. Throws ProtocolError for an empty suite or an Answer
  /// mixed with other actions.
  SuiteOutcome execute_suite(SessionState session, std::span<const Action> actions) const;

  /// execute_suite for parser output: failed calls become error blocks in
  /// place, protocol violations become a single error block. Never throws
  /// for model-generated content.
  SuiteOutcome respond(SessionState session, const ParsedCalls& calls) const;

 private:
  std::vector<ScoredChunk> run_search(const SessionState& session, const Action& action, const ChunkFilter& filter,
                                      std::size_t n) const;
  void hydrate(std::vector<ScoredChunk>& chunks) const;
  ActionBlock retrieve(const SessionState& session, const Action& action) const;

  const Corpus& corpus_;
  const SparseIndex& sparse_;
  const DenseIndex& dense_;
  const EmbeddingProvider& provider_;
  EngineOptions options_;
};

/// One agent episode's handle on the engine: owns the session state and
/// threads it through successive suites.
class EngineSession {
 public:
  explicit EngineSession(const Engine& engine) : engine_(&engine), state_(engine.new_session()) {}
  EngineSession(const Engine& engine, SessionState state) : engine_(&engine), state_(std::move(state)) {}

  ToolResponse submit(const ParsedCalls& calls);
  ToolResponse submit(std::span<const Action> actions);

  const SessionState& state() const noexcept { return state_; }
  const Engine& engine() const noexcept { return *engine_; }

 private:
  const Engine* engine_;
  SessionState state_;
};

}  // namespace cie
