#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "cie/error.hpp"
#include "cie/sparse_index.hpp"
#include "cie/text.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace cie {
namespace {

Chunk chunk(const std::string& doc, std::size_t pos, const std::string& text) {
  return {make_chunk_id(doc, pos), doc, pos, text, text::split_words(text).size()};
}

std::vector<std::pair<std::string, std::string>> as_pairs(const std::vector<Chunk>& chunks) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& c : chunks) out.emplace_back(c.chunk_id, c.text);
  return out;
}

TEST(Tokenize, LowercasesAlphanumericRuns) {
  EXPECT_EQ(tokenize("The Jaws-of-Death (1976)!"),
            (std::vector<Token>{"the", "jaws", "of", "death", "1976"}));
  EXPECT_EQ(tokenize("Żuławski  Warsaw"), (std::vector<Token>{"Żuławski", "warsaw"}));
  EXPECT_TRUE(tokenize(" ,.; ").empty());
}

TEST(SparseBuild, PostingsForTwoChunks) {
  auto idx = SparseIndex::build({chunk("x", 0, "a b"), chunk("x", 1, "b c")});
  const auto& inv = idx.inverted();
  EXPECT_EQ(inv.postings.at("a"), (std::vector<Posting>{{0, 1}}));
  EXPECT_EQ(inv.postings.at("b"), (std::vector<Posting>{{0, 1}, {1, 1}}));
  EXPECT_EQ(inv.postings.at("c"), (std::vector<Posting>{{1, 1}}));
  EXPECT_DOUBLE_EQ(inv.avg_doc_length, 2.0);
}

TEST(SparseBuild, EdgeCases) {
  auto empty = SparseIndex::build({});
  EXPECT_EQ(empty.size(), 0u);
  auto rep = SparseIndex::build({chunk("x", 0, "b b b")});
  EXPECT_EQ(rep.inverted().postings.at("b").front().tf, 3u);
  EXPECT_THROW(SparseIndex::build({chunk("x", 0, "a"), chunk("x", 0, "b")}), IndexBuildError);
}

TEST(Bm25, OneChunkClosedForm) {
  auto idx = SparseIndex::build({chunk("x", 0, "a")});
  // idf = ln((1 - 1 + 0.5) / (1 + 0.5) + 1); tf part = 2.2 / (1 + 1.2 * (0.25 + 0.75)) = 1.
  EXPECT_NEAR(idx.bm25_score({"a"}, "x#0"), std::log(4.0 / 3.0), 1e-12);
  EXPECT_EQ(idx.bm25_score({"zzz"}, "x#0"), 0.0);
  EXPECT_THROW(idx.bm25_score({"a"}, "nope#0"), NotFound);
}

TEST(Bm25, MatchesOracleOnTenChunks) {
  std::mt19937_64 rng(11);
  auto chunks = testing::random_chunks(rng, 10);
  auto idx = SparseIndex::build(chunks);
  const std::string query = "film river the war";
  auto expected = testing::oracle_bm25(as_pairs(chunks), query);
  for (const auto& e : expected) {
    EXPECT_NEAR(idx.bm25_score(tokenize(query), e.id), e.score, 1e-9) << e.id;
  }
  auto hits = idx.exact_search(query, 10);
  ASSERT_EQ(hits.size(), expected.size());
  for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i].chunk_id, expected[i].id);
}

TEST(Bm25, MonotoneInTermFrequencyAtFixedLength) {
  std::vector<Chunk> base{chunk("x", 0, "river city album band"), chunk("x", 1, "river lake poet king"),
                          chunk("x", 2, "war queen novel author")};
  auto before = SparseIndex::build(base).bm25_score({"river"}, "x#0");
  base[0].text = "river city river band";
  auto after = SparseIndex::build(base).bm25_score({"river"}, "x#0");
  EXPECT_GE(after, before);
}

TEST(ExactSearch, TopKMatchesOracleOnFiftyChunks) {
  std::mt19937_64 rng(5);
  auto chunks = testing::random_chunks(rng, 50);
  auto idx = SparseIndex::build(chunks);
  for (int q = 0; q < 20; ++q) {
    const auto query = testing::random_sentence(rng, 1, 4);
    auto expected = testing::oracle_bm25(as_pairs(chunks), query);
    for (std::size_t k : {1u, 3u, 10u, 100u}) {
      auto hits = idx.exact_search(query, k);
      ASSERT_EQ(hits.size(), std::min(k, expected.size()));
      for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(hits[i].chunk_id, expected[i].id);
        EXPECT_NEAR(hits[i].bm25_score, expected[i].score, 1e-9);
        if (i) {
          EXPECT_GE(hits[i - 1].bm25_score, hits[i].bm25_score);
        }
      }
    }
  }
}

TEST(ExactSearch, FilterRemovesTopHit) {
  std::mt19937_64 rng(9);
  auto chunks = testing::random_chunks(rng, 50);
  auto idx = SparseIndex::build(chunks);
  auto full = idx.exact_search("film director", 5);
  ASSERT_GE(full.size(), 2u);
  auto filtered = idx.exact_search("film director", 5, ChunkFilter::except({full[0].chunk_id}));
  EXPECT_EQ(filtered[0], full[1]);
  for (const auto& h : filtered) EXPECT_NE(h.chunk_id, full[0].chunk_id);

  auto only = idx.exact_search("film director", 5, ChunkFilter::only({full[1].chunk_id, "d0#0"}));
  for (const auto& h : only) EXPECT_TRUE(h.chunk_id == full[1].chunk_id || h.chunk_id == "d0#0");
}

TEST(ExactSearch, Errors) {
  auto idx = SparseIndex::build({chunk("x", 0, "a b c")});
  EXPECT_TRUE(idx.exact_search("zzz", 3).empty());
  EXPECT_THROW(idx.exact_search("  ..  ", 3), EmptyQuery);
  EXPECT_THROW(idx.exact_search("a", 0), InvalidParameter);
}

TEST(EntityMatch, PhraseContainmentNotBagOfWords) {
  auto idx = SparseIndex::build({
      chunk("jaws", 0, "The Jaws of Death is a 1976 thriller film. It was shot in Florida."),
      chunk("hound", 0, "The Hound of Death is a collection. Death of the jaws motif appears."),
      chunk("other", 0, "Nothing relevant here."),
  });
  auto hits = idx.entity_match("The Jaws of Death", "");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].hit.chunk_id, "jaws#0");
  EXPECT_FALSE(hits[0].snippets.empty());
  EXPECT_TRUE(idx.entity_match("Jaws of Life", "").empty());
  EXPECT_TRUE(idx.entity_match("the jaws of death", "x", ChunkFilter::except({"jaws#0"})).empty());
}

TEST(EntityMatch, ResultsContainPhraseAndRankByQuery) {
  std::mt19937_64 rng(21);
  auto chunks = testing::random_chunks(rng, 200, 5, 40);
  auto idx = SparseIndex::build(chunks);
  const std::string entity = "the film";
  auto hits = idx.entity_match(entity, "river war");
  const auto phrase = tokenize(entity);
  std::map<std::string, std::string> text_of;
  for (const auto& c : chunks) text_of[c.chunk_id] = c.text;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto toks = tokenize(text_of.at(hits[i].hit.chunk_id));
    EXPECT_NE(std::search(toks.begin(), toks.end(), phrase.begin(), phrase.end()), toks.end());
    EXPECT_LE(hits[i].snippets.size(), 3u);
    EXPECT_NEAR(hits[i].hit.bm25_score, idx.bm25_score(tokenize("river war"), hits[i].hit.chunk_id), 1e-12);
    if (i) {
      EXPECT_GE(hits[i - 1].hit.bm25_score, hits[i].hit.bm25_score);
    }
  }
  // Every chunk containing the phrase is returned.
  std::size_t containing = 0;
  for (const auto& c : chunks) {
    const auto toks = tokenize(c.text);
    containing += std::search(toks.begin(), toks.end(), phrase.begin(), phrase.end()) != toks.end();
  }
  EXPECT_EQ(hits.size(), containing);
}

TEST(EntityMatch, SingleContainingChunkRegardlessOfQuery) {
  auto idx = SparseIndex::build({chunk("a", 0, "Xawery Zulawski directed it."), chunk("b", 0, "Warsaw city.")});
  for (const char* q : {"", "Warsaw", "completely unrelated"}) {
    auto hits = idx.entity_match("xawery zulawski", q);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].hit.chunk_id, "a#0");
  }
}

TEST(RankSnippets, MatchesPerSentenceOracle) {
  const std::string text =
      "The river runs north. A king built the bridge over the river. Poets wrote about the king. "
      "The museum holds a painting of the bridge. Nothing else happened here.";
  const std::string query = "river bridge king";
  std::vector<std::pair<std::string, std::string>> sentences;
  const auto parts = text::split_sentences(text);
  ASSERT_EQ(parts.size(), 5u);
  for (std::size_t i = 0; i < parts.size(); ++i) sentences.emplace_back(std::to_string(i), parts[i]);
  auto oracle = testing::oracle_bm25(sentences, query);
  auto got = SparseIndex::rank_snippets(text, tokenize(query));
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(got[i], parts[std::stoul(oracle[i].id)]);
}

TEST(SparsePersistence, RoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(1);
  auto corpus = Corpus::build(testing::random_documents(rng, 30, 6), 20);
  auto idx = SparseIndex::build(corpus.chunks());
  idx.save(dir.path());
  auto loaded = SparseIndex::load(dir.path(), corpus);
  EXPECT_EQ(loaded.inverted().chunk_ids, idx.inverted().chunk_ids);
  EXPECT_EQ(loaded.inverted().postings, idx.inverted().postings);
  EXPECT_EQ(loaded.exact_search("film river", 10), idx.exact_search("film river", 10));
  dir.write("index.bin", "garbage");
  EXPECT_THROW(SparseIndex::load(dir.path(), corpus), IndexFormatError);
}

}  // namespace
}  // namespace cie
