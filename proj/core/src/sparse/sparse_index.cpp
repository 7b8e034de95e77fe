#include "cie/sparse_index.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "../binary_io.hpp"
#include "cie/bm25.hpp"
#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'C', 'I', 'E', 'S', 'P', 'R', 'S', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

bool token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool contains_sequence(const std::vector<Token>& hay, const std::vector<Token>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !token_char(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && token_char(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(text::to_lower_ascii(s.substr(start, i - start)));
  }
  return out;
}

SparseIndex SparseIndex::build(const std::vector<Chunk>& chunks) {
  SparseIndex idx;
  auto& inv = idx.index_;
  inv.chunk_ids.reserve(chunks.size());
  inv.doc_lengths.reserve(chunks.size());
  idx.texts_.reserve(chunks.size());
  std::uint64_t total = 0;
  for (const auto& c : chunks) {
    const auto ord = static_cast<std::uint32_t>(inv.chunk_ids.size());
    if (!idx.ordinals_.emplace(c.chunk_id, ord).second) {
      throw IndexBuildError("duplicate chunk_id '" + c.chunk_id + "'");
    }
    inv.chunk_ids.push_back(c.chunk_id);
    idx.texts_.push_back(c.text);
    auto tokens = tokenize(c.text);
    inv.doc_lengths.push_back(static_cast<std::uint32_t>(tokens.size()));
    total += tokens.size();
    std::sort(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i < tokens.size();) {
      std::size_t j = i;
      while (j < tokens.size() && tokens[j] == tokens[i]) ++j;
      inv.postings[tokens[i]].push_back({ord, static_cast<std::uint32_t>(j - i)});
      i = j;
    }
  }
  inv.avg_doc_length = chunks.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(chunks.size());
  return idx;
}

void SparseIndex::save(const fs::path& dir) const {
  fs::create_directories(dir);
  std::ofstream out(dir / "index.bin", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "index.bin").string());
  out.write(kMagic, sizeof kMagic);
  detail::put(out, kFormatVersion);
  detail::put<std::uint64_t>(out, index_.chunk_ids.size());
  for (std::size_t i = 0; i < index_.chunk_ids.size(); ++i) {
    detail::put_string(out, index_.chunk_ids[i]);
    detail::put(out, index_.doc_lengths[i]);
  }
  std::vector<const Token*> terms;
  terms.reserve(index_.postings.size());
  for (const auto& [t, _] : index_.postings) terms.push_back(&t);
  std::sort(terms.begin(), terms.end(), [](const Token* a, const Token* b) { return *a < *b; });
  detail::put<std::uint64_t>(out, terms.size());
  for (const Token* t : terms) {
    const auto& list = index_.postings.at(*t);
    detail::put_string(out, *t);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      detail::put(out, p.chunk);
      detail::put(out, p.tf);
    }
  }
}

SparseIndex SparseIndex::load(const fs::path& dir, const Corpus& corpus) {
  std::ifstream in(dir / "index.bin", std::ios::binary);
  if (!in) throw IndexFormatError("missing sparse index in " + dir.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(magic, magic + 8, kMagic)) throw IndexFormatError("not a sparse index file");
  if (detail::get<std::uint32_t>(in) != kFormatVersion) throw IndexFormatError("unsupported sparse index version");

  SparseIndex idx;
  auto& inv = idx.index_;
  const auto n = detail::get<std::uint64_t>(in);
  const auto& chunks = corpus.chunks();
  if (n != chunks.size()) throw IndexFormatError("sparse index does not match corpus (chunk count)");
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto id = detail::get_string(in);
    if (id != chunks[i].chunk_id) throw IndexFormatError("sparse index does not match corpus (chunk order)");
    auto len = detail::get<std::uint32_t>(in);
    idx.ordinals_.emplace(id, static_cast<std::uint32_t>(i));
    inv.chunk_ids.push_back(std::move(id));
    inv.doc_lengths.push_back(len);
    idx.texts_.push_back(chunks[i].text);
    total += len;
  }
  inv.avg_doc_length = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
  const auto terms = detail::get<std::uint64_t>(in);
  for (std::uint64_t t = 0; t < terms; ++t) {
    auto term = detail::get_string(in);
    const auto count = detail::get<std::uint32_t>(in);
    std::vector<Posting> list(count);
    for (auto& p : list) {
      p.chunk = detail::get<std::uint32_t>(in);
      p.tf = detail::get<std::uint32_t>(in);
      if (p.chunk >= n) throw IndexFormatError("posting references unknown chunk");
    }
    inv.postings.emplace(std::move(term), std::move(list));
  }
  return idx;
}

std::uint32_t SparseIndex::ordinal(const std::string& chunk_id) const {
  auto it = ordinals_.find(chunk_id);
  if (it == ordinals_.end()) throw NotFound("unknown chunk_id '" + chunk_id + "'");
  return it->second;
}

double SparseIndex::bm25_score(const std::vector<Token>& query_tokens, const std::string& chunk_id) const {
  const auto ord = ordinal(chunk_id);
  const auto n = index_.num_chunks();
  double score = 0.0;
  for (const auto& t : query_tokens) {
    auto it = index_.postings.find(t);
    if (it == index_.postings.end()) continue;
    const auto& list = it->second;
    auto p = std::lower_bound(list.begin(), list.end(), ord,
                              [](const Posting& a, std::uint32_t o) { return a.chunk < o; });
    if (p == list.end() || p->chunk != ord) continue;
    score += bm25::idf(n, list.size()) *
             bm25::tf_weight(p->tf, index_.doc_lengths[ord], index_.avg_doc_length);
  }
  return score;
}

// Term-at-a-time accumulation. Query tokens are added in query order so the
// per-chunk sum matches bm25_score() bit for bit.
std::vector<std::pair<double, std::uint32_t>> SparseIndex::accumulate(const std::vector<Token>& tokens,
                                                                      const ChunkFilter& filter) const {
  const auto n = index_.num_chunks();
  std::vector<double> acc(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::uint32_t> hits;
  for (const auto& t : tokens) {
    auto it = index_.postings.find(t);
    if (it == index_.postings.end()) continue;
    const double w = bm25::idf(n, it->second.size());
    for (const auto& p : it->second) {
      if (!touched[p.chunk]) {
        touched[p.chunk] = 1;
        hits.push_back(p.chunk);
      }
      acc[p.chunk] += w * bm25::tf_weight(p.tf, index_.doc_lengths[p.chunk], index_.avg_doc_length);
    }
  }
  std::vector<std::pair<double, std::uint32_t>> scored;
  scored.reserve(hits.size());
  for (auto h : hits) {
    if (filter.allows(index_.chunk_ids[h])) scored.emplace_back(acc[h], h);
  }
  return scored;
}

std::vector<SparseHit> SparseIndex::exact_search(std::string_view keywords, std::size_t k,
                                                 const ChunkFilter& filter) const {
  if (k == 0) throw InvalidParameter("k must be >= 1");
  const auto tokens = tokenize(keywords);
  if (tokens.empty()) throw EmptyQuery();
  auto scored = accumulate(tokens, filter);
  const auto& ids = index_.chunk_ids;
  auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return ids[a.second] < ids[b.second];
  };
  const auto take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  std::vector<SparseHit> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({ids[scored[i].second], scored[i].first});
  return out;
}

std::vector<EntityHit> SparseIndex::entity_match(std::string_view entity, std::string_view query,
                                                 const ChunkFilter& filter, std::size_t k) const {
  const auto entity_tokens = tokenize(entity);
  if (entity_tokens.empty()) throw InvalidParameter("entity must contain at least one token");
  if (k == 0) throw InvalidParameter("k must be >= 1");
  auto query_tokens = tokenize(query);
  if (query_tokens.empty()) query_tokens = entity_tokens;

  // Candidate ordinals: postings of the rarest entity token.
  const std::vector<Posting>* rarest = nullptr;
  for (const auto& t : entity_tokens) {
    auto it = index_.postings.find(t);
    if (it == index_.postings.end()) return {};
    if (rarest == nullptr || it->second.size() < rarest->size()) rarest = &it->second;
  }

  std::vector<std::pair<double, std::uint32_t>> scored;
  for (const auto& p : *rarest) {
    const auto& id = index_.chunk_ids[p.chunk];
    if (!filter.allows(id)) continue;
    if (!contains_sequence(tokenize(texts_[p.chunk]), entity_tokens)) continue;
    scored.emplace_back(bm25_score(query_tokens, id), p.chunk);
  }
  const auto& ids = index_.chunk_ids;
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return ids[a.second] < ids[b.second];
  });
  if (scored.size() > k) scored.resize(k);

  std::vector<EntityHit> out;
  out.reserve(scored.size());
  for (const auto& [score, ord] : scored) {
    out.push_back({{ids[ord], score}, rank_snippets(texts_[ord], query_tokens)});
  }
  return out;
}

std::vector<std::string> SparseIndex::rank_snippets(std::string_view chunk_text,
                                                    const std::vector<Token>& query_tokens, std::size_t max) {
  auto sentences = text::split_sentences(chunk_text);
  if (sentences.empty() || max == 0) return {};
  std::vector<std::vector<Token>> toks;
  toks.reserve(sentences.size());
  std::size_t total = 0;
  for (const auto& s : sentences) {
    toks.push_back(tokenize(s));
    total += toks.back().size();
  }
  const auto n = sentences.size();
  const double avg = static_cast<double>(total) / static_cast<double>(n);
  std::vector<double> scores(n, 0.0);
  for (const auto& q : query_tokens) {
    std::size_t df = 0;
    std::vector<std::size_t> tf(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      tf[i] = static_cast<std::size_t>(std::count(toks[i].begin(), toks[i].end(), q));
      if (tf[i] > 0) ++df;
    }
    if (df == 0) continue;
    const double w = bm25::idf(n, df);
    for (std::size_t i = 0; i < n; ++i) {
      if (tf[i] > 0) scores[i] += w * bm25::tf_weight(tf[i], toks[i].size(), avg);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(max, n); ++i) out.push_back(std::move(sentences[order[i]]));
  return out;
}

}  // namespace cie
