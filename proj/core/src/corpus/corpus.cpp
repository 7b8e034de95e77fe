#include "cie/corpus.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "cie/error.hpp"
#include "cie/hash.hpp"
#include "cie/text.hpp"

namespace cie {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kStoreVersion = 1;

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::vector<std::string_view>& words, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out.push_back(' ');
    out.append(words[i]);
  }
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LoadError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace

std::string make_chunk_id(const std::string& doc_id, std::size_t position) {
  return doc_id + "#" + std::to_string(position);
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t target_words) {
  if (target_words == 0) throw InvalidParameter("target_words must be >= 1");
  const auto words = text::split_words(doc.text);
  if (words.empty()) throw EmptyDocument(doc.doc_id);

  // Sentence spans, with over-long sentences pre-split into target-sized pieces.
  std::vector<Span> pieces;
  std::size_t start = 0;
  auto emit_sentence = [&](std::size_t b, std::size_t e) {
    if (e - b > 2 * target_words) {
      for (std::size_t p = b; p < e; p += target_words) {
        pieces.push_back({p, std::min(p + target_words, e)});
      }
    } else {
      pieces.push_back({b, e});
    }
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (text::ends_sentence(words[i])) {
      emit_sentence(start, i + 1);
      start = i + 1;
    }
  }
  if (start < words.size()) emit_sentence(start, words.size());

  std::vector<Chunk> chunks;
  std::size_t chunk_begin = pieces.front().begin;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::size_t end = pieces[i].end;
    const bool last = i + 1 == pieces.size();
    if (end - chunk_begin >= target_words || last) {
      Chunk c;
      c.doc_id = doc.doc_id;
      c.position = chunks.size();
      c.chunk_id = make_chunk_id(doc.doc_id, c.position);
      c.text = join(words, chunk_begin, end);
      c.word_count = end - chunk_begin;
      chunks.push_back(std::move(c));
      chunk_begin = end;
    }
  }
  return chunks;
}

std::string chunk_checksum(const std::vector<Chunk>& chunks) {
  Sha256 h;
  for (const auto& c : chunks) {
    h.update(c.chunk_id);
    h.update(std::string_view("\x1f", 1));
    h.update(c.text);
    h.update(std::string_view("\x1e", 1));
  }
  return h.hex_digest();
}

Corpus Corpus::build(std::vector<Document> docs, std::size_t target_words) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.doc_id).second) throw DuplicateDocument(d.doc_id);
    auto chunks = chunk_document(d, target_words);
    for (auto& c : chunks) corpus.chunks_.push_back(std::move(c));
  }
  corpus.docs_ = std::move(docs);
  corpus.manifest_.num_documents = corpus.docs_.size();
  corpus.manifest_.num_chunks = corpus.chunks_.size();
  corpus.manifest_.chunk_target_words = target_words;
  corpus.manifest_.checksum = chunk_checksum(corpus.chunks_);
  corpus.manifest_.corpus_id = "corpus-" + corpus.manifest_.checksum.substr(0, 12);
  corpus.manifest_.created_at = utc_now();
  corpus.reindex();
  return corpus;
}

void Corpus::reindex() {
  doc_pos_.clear();
  chunk_pos_.clear();
  doc_chunks_.clear();
  for (std::size_t i = 0; i < docs_.size(); ++i) doc_pos_.emplace(docs_[i].doc_id, i);
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    chunk_pos_.emplace(chunks_[i].chunk_id, i);
    doc_chunks_[chunks_[i].doc_id].push_back(chunks_[i].chunk_id);
  }
}

const Chunk& Corpus::get_chunk(const std::string& chunk_id) const {
  auto it = chunk_pos_.find(chunk_id);
  if (it == chunk_pos_.end()) throw NotFound("unknown chunk_id '" + chunk_id + "'");
  return chunks_[it->second];
}

const Document& Corpus::get_document(const std::string& doc_id) const {
  auto it = doc_pos_.find(doc_id);
  if (it == doc_pos_.end()) throw NotFound("unknown doc_id '" + doc_id + "'");
  return docs_[it->second];
}

bool Corpus::has_document(const std::string& doc_id) const { return doc_pos_.contains(doc_id); }

const std::vector<std::string>& Corpus::chunks_of(const std::string& doc_id) const {
  static const std::vector<std::string> kEmpty;
  auto it = doc_chunks_.find(doc_id);
  return it == doc_chunks_.end() ? kEmpty : it->second;
}

void Corpus::save(const fs::path& dir) const {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "documents");
    for (const auto& d : docs_) {
      out << json{{"doc_id", d.doc_id}, {"title", d.title}, {"text", d.text}}.dump() << '\n';
    }
  }
  {
    auto out = open_out(dir / "chunks");
    for (const auto& c : chunks_) {
      out << json{{"chunk_id", c.chunk_id},
                  {"doc_id", c.doc_id},
                  {"position", c.position},
                  {"word_count", c.word_count},
                  {"text", c.text}}
                 .dump()
          << '\n';
    }
  }
  auto out = open_out(dir / "manifest");
  out << json{{"format_version", kStoreVersion},
              {"corpus_id", manifest_.corpus_id},
              {"num_documents", manifest_.num_documents},
              {"num_chunks", manifest_.num_chunks},
              {"chunk_target_words", manifest_.chunk_target_words},
              {"created_at", manifest_.created_at},
              {"checksum", manifest_.checksum}}
             .dump(2)
      << '\n';
}

Corpus Corpus::load(const fs::path& dir) {
  Corpus corpus;
  try {
    auto in = open_in(dir / "manifest");
    auto m = json::parse(in);
    if (m.at("format_version").get<int>() != kStoreVersion) {
      throw IndexFormatError("unsupported corpus store version in " + dir.string());
    }
    corpus.manifest_.corpus_id = m.at("corpus_id").get<std::string>();
    corpus.manifest_.num_documents = m.at("num_documents").get<std::size_t>();
    corpus.manifest_.num_chunks = m.at("num_chunks").get<std::size_t>();
    corpus.manifest_.chunk_target_words = m.at("chunk_target_words").get<std::size_t>();
    corpus.manifest_.created_at = m.at("created_at").get<std::string>();
    corpus.manifest_.checksum = m.at("checksum").get<std::string>();

    std::string line;
    auto docs_in = open_in(dir / "documents");
    while (std::getline(docs_in, line)) {
      if (text::trim(line).empty()) continue;
      auto j = json::parse(line);
      corpus.docs_.push_back({j.at("doc_id").get<std::string>(), j.at("title").get<std::string>(),
                              j.at("text").get<std::string>()});
    }
    auto chunks_in = open_in(dir / "chunks");
    while (std::getline(chunks_in, line)) {
      if (text::trim(line).empty()) continue;
      auto j = json::parse(line);
      Chunk c;
      c.chunk_id = j.at("chunk_id").get<std::string>();
      c.doc_id = j.at("doc_id").get<std::string>();
      c.position = j.at("position").get<std::size_t>();
      c.word_count = j.at("word_count").get<std::size_t>();
      c.text = j.at("text").get<std::string>();
      corpus.chunks_.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw IndexFormatError("corrupt corpus store in " + dir.string() + ": " + e.what());
  }
  if (corpus.docs_.size() != corpus.manifest_.num_documents ||
      corpus.chunks_.size() != corpus.manifest_.num_chunks) {
    throw IndexFormatError("corpus store counts do not match manifest in " + dir.string());
  }
  if (chunk_checksum(corpus.chunks_) != corpus.manifest_.checksum) {
    throw IndexFormatError("corpus store checksum mismatch in " + dir.string());
  }
  corpus.reindex();
  return corpus;
}

std::vector<Document> read_documents(const fs::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw LoadError("cannot open " + source.string());
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  auto field = [&](const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw IngestError(lineno, std::string("missing field '") + name + "'");
    if (!it->is_string()) throw IngestError(lineno, std::string("field '") + name + "' must be a string");
    return it->get<std::string>();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IngestError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw IngestError(lineno, "record must be a JSON object");
    Document d{field(j, "doc_id"), field(j, "title"), field(j, "text")};
    if (d.doc_id.empty()) throw IngestError(lineno, "empty doc_id");
    if (text::trim(d.text).empty()) throw IngestError(lineno, "document '" + d.doc_id + "' has no text");
    if (!seen.insert(d.doc_id).second) throw DuplicateDocument(d.doc_id);
    docs.push_back(std::move(d));
  }
  return docs;
}

CorpusManifest ingest_corpus(const fs::path& source, const fs::path& out_dir, std::size_t target_words) {
  auto corpus = Corpus::build(read_documents(source), target_words);
  corpus.save(out_dir);
  return corpus.manifest();
}

}  // namespace cie
