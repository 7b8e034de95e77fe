#include "cie/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "cie/text.hpp"

namespace cie {

namespace {

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

std::vector<std::string> normalized_tokens(std::string_view s) {
  const auto normalized = normalize_answer(s);
  std::vector<std::string> out;
  for (auto w : text::split_words(normalized)) out.emplace_back(w);
  return out;
}

double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
  std::map<std::string_view, int> counts;
  for (const auto& t : gold) ++counts[t];
  int same = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  const double precision = static_cast<double>(same) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(same) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  no_punct.reserve(s.size());
  for (unsigned char c : s) {
    if (c < 0x80 && std::ispunct(c)) continue;
    no_punct.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
  }
  std::string out;
  for (auto w : text::split_words(no_punct)) {
    if (is_article(w)) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  }
  return out;
}

int exact_match(std::string_view prediction, std::span<const std::string> golds) {
  const auto p = normalize_answer(prediction);
  return std::any_of(golds.begin(), golds.end(), [&](const std::string& g) { return normalize_answer(g) == p; })
             ? 1
             : 0;
}

double f1_score(std::string_view prediction, std::span<const std::string> golds) {
  const auto p = normalized_tokens(prediction);
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, token_f1(p, normalized_tokens(g)));
  return best;
}

}  // namespace cie
