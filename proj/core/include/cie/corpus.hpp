#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace cie {

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;

  bool operator==(const Document&) const = default;
};

/// Retrieval unit. `chunk_id` is `<doc_id>#<position>`.
struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::size_t position = 0;
  std::string text;
  std::size_t word_count = 0;

  bool operator==(const Chunk&) const = default;
};

struct CorpusManifest {
  std::string corpus_id;
  std::size_t num_documents = 0;
  std::size_t num_chunks = 0;
  std::size_t chunk_target_words = 0;
  std::string created_at;  // ISO-8601 UTC
  std::string checksum;    // sha256 over chunk ids and texts
};

std::string make_chunk_id(const std::string& doc_id, std::size_t position);

/// Greedy sentence packing: a chunk closes once it holds at least
/// `target_words` words or the document ends. Sentences longer than
/// 2*target_words are hard-split into target_words pieces first.
///
/// Throws EmptyDocument for whitespace-only text and InvalidParameter for
/// target_words == 0.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t target_words);

/// Sha256 over (chunk_id, text) pairs in order.
std::string chunk_checksum(const std::vector<Chunk>& chunks);

/// In-memory corpus: documents plus their chunks, immutable once built.
/// Chunks keep ingestion order, which is also the ordinal order every index
/// uses.
class Corpus {
 public:
  Corpus() = default;

  /// Chunks every document. Throws DuplicateDocument / EmptyDocument.
  static Corpus build(std::vector<Document> docs, std::size_t target_words);

  /// Loads `<dir>/manifest`, `<dir>/documents`, `<dir>/chunks`.
  static Corpus load(const std::filesystem::path& dir);

  /// Writes the store files. Existing files are replaced.
  void save(const std::filesystem::path& dir) const;

  const CorpusManifest& manifest() const noexcept { return manifest_; }
  const std::vector<Document>& documents() const noexcept { return docs_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }

  const Chunk& get_chunk(const std::string& chunk_id) const;
  const Document& get_document(const std::string& doc_id) const;
  bool has_document(const std::string& doc_id) const;

  /// Chunk ids of a document in position order; empty for unknown ids.
  const std::vector<std::string>& chunks_of(const std::string& doc_id) const;

 private:
  void reindex();

  CorpusManifest manifest_;
  std::vector<Document> docs_;
  std::vector<Chunk> chunks_;
  std::unordered_map<std::string, std::size_t> doc_pos_;
  std::unordered_map<std::string, std::size_t> chunk_pos_;
  std::unordered_map<std::string, std::vector<std::string>> doc_chunks_;
};

/// Reads line-delimited JSON records {doc_id, title, text}. Blank lines are
/// skipped. Throws IngestError (with 1-based line) or DuplicateDocument.
std::vector<Document> read_documents(const std::filesystem::path& source);

/// read_documents + Corpus::build + save. Idempotent for identical input.
CorpusManifest ingest_corpus(const std::filesystem::path& source,
                             const std::filesystem::path& out_dir,
                             std::size_t target_words);

}  // namespace cie
