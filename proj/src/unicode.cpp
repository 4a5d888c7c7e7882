#include "darja/unicode.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace darja::unicode {

std::u32string decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const int32_t n = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(s, i, n, c);
        out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) {
        len = 0;
        U8_APPEND_UNSAFE(buf, len, 0xFFFD);
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t c : cps) append(out, c);
    return out;
}

std::size_t length(std::string_view utf8) {
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const int32_t n = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    std::size_t count = 0;
    while (i < n) {
        U8_FWD_1(s, i, n);
        ++count;
    }
    return count;
}

bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_whitespace(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }
bool is_punctuation(char32_t cp) { return u_ispunct(static_cast<UChar32>(cp)); }
bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
bool is_ascii_letter(char32_t cp) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}
char32_t to_lower(char32_t cp) {
    return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
    std::vector<std::string> tokens;
    std::string current;
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const int32_t n = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < n) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, n, c);
        if (c >= 0 && u_isUWhiteSpace(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.append(utf8.substr(static_cast<std::size_t>(start),
                                       static_cast<std::size_t>(i - start)));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string trim_punctuation(std::string_view utf8) {
    std::u32string cps = decode(utf8);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_punctuation(cps[b])) ++b;
    while (e > b && is_punctuation(cps[e - 1])) --e;
    return encode(std::u32string_view(cps).substr(b, e - b));
}

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace darja::unicode
