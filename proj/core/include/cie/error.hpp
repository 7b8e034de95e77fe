#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cie {

/// Base for every error raised by the library. Catch this at process edges.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyDocument : public Error {
 public:
  explicit EmptyDocument(const std::string& doc_id)
      : Error("document '" + doc_id + "' has no text"), doc_id_(doc_id) {}
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

/// Malformed corpus record. `line()` is 1-based.
class IngestError : public Error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateDocument : public Error {
 public:
  explicit DuplicateDocument(const std::string& doc_id)
      : Error("duplicate doc_id '" + doc_id + "'"), doc_id_(doc_id) {}
  const std::string& doc_id() const noexcept { return doc_id_; }

 private:
  std::string doc_id_;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class IndexBuildError : public Error {
 public:
  using Error::Error;
};

/// On-disk index is missing, corrupt, or was built for a different provider.
class IndexFormatError : public Error {
 public:
  using Error::Error;
};

class EmptyQuery : public Error {
 public:
  EmptyQuery() : Error("query contains no searchable tokens") {}
};

class EmbeddingError : public Error {
 public:
  EmbeddingError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// Chat-model transport or protocol failure.
class ClientError : public Error {
 public:
  ClientError(const std::string& what, bool retryable) : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Structural misuse of the tool-call protocol (empty suite, answer mixed
/// with other actions).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

class GroupTooSmall : public Error {
 public:
  explicit GroupTooSmall(std::size_t n)
      : Error("group advantage needs at least 2 rewards, got " + std::to_string(n)) {}
};

/// Dataset or trajectory file could not be loaded.
class LoadError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cie
