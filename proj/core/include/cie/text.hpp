#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cie::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Whitespace-delimited words, in order.
std::vector<std::string_view> split_words(std::string_view s);

/// Words joined by single spaces.
std::string normalize_whitespace(std::string_view s);

/// A word ends a sentence when its last character is '.', '?' or '!'.
/// Together with whitespace splitting this is "terminal punctuation followed
/// by whitespace (or end of text)".
bool ends_sentence(std::string_view word) noexcept;

/// Sentences as whitespace-normalized strings. No abbreviation handling.
std::vector<std::string> split_sentences(std::string_view s);

std::string to_lower_ascii(std::string_view s);

/// Rewrites every `</` in serialized JSON as `<\/` so an embedded string
/// cannot close the tag that wraps the payload.
std::string guard_closing_tags(std::string serialized_json);

}  // namespace cie::text
