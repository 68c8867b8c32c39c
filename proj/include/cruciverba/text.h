#pragma once

// UTF-8 helpers shared by the curation rules, the clue validator, ROUGE
// tokenization and answer normalization. Backed by ICU.

#include <string>
#include <string_view>
#include <vector>

namespace cruciverba::text {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);

// NFC composition, so "e" + U+0300 and U+00E8 compare equal.
std::string nfc(std::string_view utf8);
std::string to_lower(std::string_view utf8);
std::string to_upper(std::string_view utf8);
// Canonical decomposition with combining marks removed (à -> a).
std::string fold_accents(std::string_view utf8);

bool is_letter(char32_t c);
bool is_digit(char32_t c);
bool is_mark(char32_t c);
bool is_space(char32_t c);

// Collapses every run of Unicode whitespace to one ASCII space and trims.
std::string normalize_whitespace(std::string_view utf8);
std::string trim(std::string_view utf8);

// Whitespace-separated tokens.
std::vector<std::string> split_whitespace(std::string_view utf8);

std::size_t length(std::string_view utf8);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace cruciverba::text
