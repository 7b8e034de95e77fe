#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cie {

struct QAExample {
  std::string question;
  std::vector<std::string> gold_answers;
  std::string dataset_tag;

  bool operator==(const QAExample&) const = default;
};

/// Line-delimited {"question", "answers": [...], "dataset"} records. The
/// whole file is validated before anything is returned. Throws LoadError.
std::vector<QAExample> load_dataset(const std::filesystem::path& file);
std::vector<QAExample> parse_dataset(std::string_view jsonl);

}  // namespace cie
