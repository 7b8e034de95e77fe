#include "cie/eval/dataset.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cie/error.hpp"
#include "cie/text.hpp"

namespace cie {

std::vector<QAExample> parse_dataset(std::string_view jsonl) {
  std::vector<QAExample> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto where = "dataset line " + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      QAExample ex;
      ex.question = j.at("question").get<std::string>();
      const auto& answers = j.at("answers");
      if (answers.is_string()) {
        ex.gold_answers.push_back(answers.get<std::string>());
      } else {
        ex.gold_answers = answers.get<std::vector<std::string>>();
      }
      ex.dataset_tag = j.value("dataset", std::string("default"));
      if (text::trim(ex.question).empty()) throw LoadError(where + "empty question");
      if (ex.gold_answers.empty()) throw LoadError(where + "no gold answers");
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(where + e.what());
    }
  }
  return out;
}

std::vector<QAExample> load_dataset(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

}  // namespace cie
