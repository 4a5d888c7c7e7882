#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace darja {

enum class Script { Arabic, Latin };

std::string_view to_string(Script script);
std::optional<Script> parse_script(std::string_view name);

struct RawUtterance {
    std::string text;
    std::optional<std::string> source_tag;
};

// A privacy replacement. [begin, end) are codepoint offsets into the raw text.
struct MaskRecord {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string token;
    std::string original;

    bool operator==(const MaskRecord&) const = default;
};

struct NormalizedUtterance {
    std::string text;
    Script script = Script::Latin;
    std::vector<MaskRecord> masks;
};

struct MaskResult {
    std::string text;
    std::vector<MaskRecord> masks;
};

inline constexpr std::string_view kPhoneToken = "[PHONE]";

// Arabic wins only with strictly more Arabic letters (Lo in U+0600-U+06FF)
// than ASCII letters. [PHONE] tokens are not counted.
Script detect_script(std::string_view text);

// Alef variants -> Alef, Alef Maqsura -> Ya, Ta Marbuta -> Ha, drops
// Tatweel and harakat U+064B-U+0652.
std::string normalize_arabic(std::string_view text);

// Lowercase, apostrophe unification, and 3/7/9 -> a/h/q for digits touching
// a letter. A run of such digits touching a letter is converted whole.
std::string normalize_latin(std::string_view text);

// Collapses runs of >= 3 identical codepoints. Digits and [PHONE] tokens
// are never squashed.
std::string squash_repeats(std::string_view text);

// 0[567] followed by 8 digits, single space/dot/hyphen allowed between
// digits after the prefix, not adjacent to other digits.
MaskResult mask_phone(std::string_view text);

// Full pipeline: NFC, phone masking, script detection, Arabic grapheme
// unification, Latin-stream cleanup, squashing, whitespace collapse. The
// pass is iterated to its fixed point so the result is idempotent.
NormalizedUtterance normalize(const RawUtterance& raw);
NormalizedUtterance normalize(std::string_view text);

}  // namespace darja
