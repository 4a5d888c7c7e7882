#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace darja::unicode {

// Invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

std::size_t length(std::string_view utf8);

bool is_letter(char32_t cp);
bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_ascii_letter(char32_t cp);
char32_t to_lower(char32_t cp);

// Splits on Unicode whitespace; empty tokens are dropped.
std::vector<std::string> split_whitespace(std::string_view utf8);

// Strips leading and trailing punctuation codepoints.
std::string trim_punctuation(std::string_view utf8);

std::string trim(std::string_view s);

}  // namespace darja::unicode
