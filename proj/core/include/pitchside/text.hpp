#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pitchside::text {

// Unicode case folding followed by NFC normalization. Invalid UTF-8 sequences
// are replaced with U+FFFD.
std::string fold(std::string_view utf8);

// Strips one leading '#' (or U+FF03), folds, and trims surrounding
// whitespace. Returns nullopt when nothing remains.
std::optional<std::string> normalize_hashtag(std::string_view raw);

// True iff `term` occurs in `haystack` with no letter, digit or underscore
// immediately before or after the occurrence. Both arguments are expected to
// be folded already.
bool contains_word(std::string_view haystack, std::string_view term);

}  // namespace pitchside::text
