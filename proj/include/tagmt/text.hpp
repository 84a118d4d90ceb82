#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tagmt {

// Whitespace-delimited tokens (space, tab, CR, LF). Empty tokens never appear.
std::vector<std::string> split_ws(std::string_view s);

std::string join(const std::vector<std::string>& parts, char sep = ' ');

std::string trim(std::string_view s);

// Splits into UTF-8 codepoint units; an invalid byte becomes its own unit.
std::vector<std::string> utf8_chars(std::string_view s);

// Lowercases ASCII plus Latin-1 / Latin Extended-A letters, keeping accents.
std::string utf8_lower(std::string_view s);

// Speaker-name key: lowercase, Latin diacritics folded to ASCII, every run of
// non-alphanumeric characters replaced by a single space, trimmed. Idempotent.
std::string normalize_name(std::string_view s);

// Levenshtein distance, early-exits once the distance exceeds `cap` and then
// returns cap + 1.
std::size_t levenshtein_capped(std::string_view a, std::string_view b,
                               std::size_t cap);

}  // namespace tagmt
