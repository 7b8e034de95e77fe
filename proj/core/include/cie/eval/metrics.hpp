#pragma once

#include <span>
#include <string>
#include <string_view>

namespace cie {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace.
std::string normalize_answer(std::string_view s);

/// 1 when the normalized prediction equals some normalized gold answer.
int exact_match(std::string_view prediction, std::span<const std::string> golds);

/// Token-level F1 of normalized strings, max over gold answers. Two empty
/// strings score 1, one empty string scores 0.
double f1_score(std::string_view prediction, std::span<const std::string> golds);

}  // namespace cie
