#include "darja/normalize.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <stdexcept>

#include "darja/unicode.hpp"

namespace darja {
namespace {

// Internal stand-in for a [PHONE] token so that no later step can split,
// lowercase, or squash it. U+FDD0 is a noncharacter and never survives input.
constexpr char32_t kTokenSentinel = 0xFDD0;
constexpr std::u32string_view kPhoneTokenCps = U"[PHONE]";

constexpr std::size_t kMaxPasses = 16;

// Codepoints paired with their offset in the raw input.
struct Tape {
    std::u32string cps;
    std::vector<std::size_t> origin;

    void push(char32_t c, std::size_t o) {
        cps.push_back(c);
        origin.push_back(o);
    }
};

Tape make_tape(std::u32string_view raw) {
    Tape t;
    t.cps.reserve(raw.size());
    t.origin.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        t.push(raw[i] == kTokenSentinel ? U'�' : raw[i], i);
    }
    return t;
}

std::string render(const Tape& t) {
    std::string out;
    out.reserve(t.cps.size());
    for (char32_t c : t.cps) {
        if (c == kTokenSentinel) {
            out.append(kPhoneToken);
        } else {
            unicode::append(out, c);
        }
    }
    return out;
}

void protect_tokens(Tape& t) {
    if (t.cps.find(kPhoneTokenCps) == std::u32string::npos) return;
    Tape out;
    for (std::size_t i = 0; i < t.cps.size();) {
        if (t.cps.compare(i, kPhoneTokenCps.size(), kPhoneTokenCps) == 0) {
            out.push(kTokenSentinel, t.origin[i]);
            i += kPhoneTokenCps.size();
        } else {
            out.push(t.cps[i], t.origin[i]);
            ++i;
        }
    }
    t = std::move(out);
}

const icu::Normalizer2& nfc() {
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
        if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
        return n;
    }();
    return *instance;
}

icu::UnicodeString to_icu(std::u32string_view cps) {
    return icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(cps.data()),
                                         static_cast<int32_t>(cps.size()));
}

std::u32string from_icu(const icu::UnicodeString& s) {
    std::u32string out;
    for (int32_t i = 0; i < s.length();) {
        const UChar32 c = s.char32At(i);
        out.push_back(static_cast<char32_t>(c));
        i += U16_LENGTH(c);
    }
    return out;
}

// NFC applied per normalization segment, so every output codepoint can be
// attributed to the first raw codepoint of its segment.
void compose(Tape& t) {
    const auto& n = nfc();
    UErrorCode status = U_ZERO_ERROR;
    if (n.isNormalized(to_icu(t.cps), status) && U_SUCCESS(status)) return;

    Tape out;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        if (end <= start) return;
        UErrorCode st = U_ZERO_ERROR;
        const auto seg = std::u32string_view(t.cps).substr(start, end - start);
        const icu::UnicodeString normalized = n.normalize(to_icu(seg), st);
        if (U_FAILURE(st)) {
            for (std::size_t i = start; i < end; ++i) out.push(t.cps[i], t.origin[i]);
            return;
        }
        for (char32_t c : from_icu(normalized)) out.push(c, t.origin[start]);
    };
    for (std::size_t i = 1; i <= t.cps.size(); ++i) {
        if (i == t.cps.size() || n.hasBoundaryBefore(static_cast<UChar32>(t.cps[i]))) {
            flush(i);
            start = i;
        }
    }
    t = std::move(out);
}

bool is_phone_separator(char32_t c) { return c == U' ' || c == U'.' || c == U'-'; }

// Returns one past the last digit of a phone match starting at `i`, or 0.
std::size_t match_phone_at(const std::u32string& s, std::size_t i) {
    const std::size_t n = s.size();
    if (s[i] != U'0') return 0;
    if (i > 0 && unicode::is_ascii_digit(s[i - 1])) return 0;
    if (i + 1 >= n || (s[i + 1] != U'5' && s[i + 1] != U'6' && s[i + 1] != U'7')) return 0;
    std::size_t j = i + 2;
    int digits = 0;
    while (digits < 8) {
        if (j >= n) return 0;
        if (unicode::is_ascii_digit(s[j])) {
            ++digits;
            ++j;
        } else if (is_phone_separator(s[j]) && j + 1 < n && unicode::is_ascii_digit(s[j + 1])) {
            ++j;
        } else {
            return 0;
        }
    }
    if (j < n && unicode::is_ascii_digit(s[j])) return 0;
    return j;
}

void mask_phones(Tape& t, std::u32string_view raw, std::vector<MaskRecord>& masks) {
    Tape out;
    for (std::size_t i = 0; i < t.cps.size();) {
        const std::size_t end = match_phone_at(t.cps, i);
        if (end == 0) {
            out.push(t.cps[i], t.origin[i]);
            ++i;
            continue;
        }
        MaskRecord rec;
        rec.begin = t.origin[i];
        rec.end = t.origin[end - 1] + 1;
        rec.token = std::string(kPhoneToken);
        rec.original = unicode::encode(raw.substr(rec.begin, rec.end - rec.begin));
        masks.push_back(std::move(rec));
        out.push(kTokenSentinel, t.origin[i]);
        i = end;
    }
    t = std::move(out);
}

bool is_arabic_letter(char32_t c) {
    return c >= 0x0600 && c <= 0x06FF && u_charType(static_cast<UChar32>(c)) == U_OTHER_LETTER;
}

Script detect(const std::u32string& cps) {
    std::size_t arabic = 0;
    std::size_t latin = 0;
    for (char32_t c : cps) {
        if (is_arabic_letter(c)) {
            ++arabic;
        } else if (unicode::is_ascii_letter(c)) {
            ++latin;
        }
    }
    return arabic > latin ? Script::Arabic : Script::Latin;
}

void apply_arabic(Tape& t) {
    Tape out;
    out.cps.reserve(t.cps.size());
    out.origin.reserve(t.cps.size());
    for (std::size_t i = 0; i < t.cps.size(); ++i) {
        char32_t c = t.cps[i];
        switch (c) {
            case 0x0622:
            case 0x0623:
            case 0x0625:
            case 0x0671:
                c = 0x0627;
                break;
            case 0x0649:
                c = 0x064A;
                break;
            case 0x0629:
                c = 0x0647;
                break;
            default:
                break;
        }
        if (c == 0x0640 || (c >= 0x064B && c <= 0x0652)) continue;
        out.push(c, t.origin[i]);
    }
    t = std::move(out);
}

bool is_desub_digit(char32_t c) { return c == U'3' || c == U'7' || c == U'9'; }

char32_t desub(char32_t c) {
    switch (c) {
        case U'3': return U'a';
        case U'7': return U'h';
        case U'9': return U'q';
        default: return c;
    }
}

void apply_latin(Tape& t) {
    for (char32_t& c : t.cps) {
        if (c == kTokenSentinel) continue;
        c = unicode::to_lower(c);
        if (c == 0x2019 || c == 0x02BC || c == 0x0060) c = U'\'';
    }
    auto letter = [](char32_t c) { return c != kTokenSentinel && unicode::is_letter(c); };
    const std::size_t n = t.cps.size();
    for (std::size_t i = 0; i < n;) {
        if (!is_desub_digit(t.cps[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && is_desub_digit(t.cps[j])) ++j;
        const bool touches = (i > 0 && letter(t.cps[i - 1])) || (j < n && letter(t.cps[j]));
        if (touches) {
            for (std::size_t k = i; k < j; ++k) t.cps[k] = desub(t.cps[k]);
        }
        i = j;
    }
}

void apply_squash(Tape& t) {
    Tape out;
    const std::size_t n = t.cps.size();
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && t.cps[j] == t.cps[i]) ++j;
        const char32_t c = t.cps[i];
        const bool keep_all = (j - i) < 3 || unicode::is_ascii_digit(c) || c == kTokenSentinel;
        const std::size_t keep = keep_all ? j - i : 1;
        for (std::size_t k = 0; k < keep; ++k) out.push(c, t.origin[i + k]);
        i = j;
    }
    t = std::move(out);
}

void collapse_whitespace(Tape& t) {
    Tape out;
    bool pending_space = false;
    std::size_t space_origin = 0;
    for (std::size_t i = 0; i < t.cps.size(); ++i) {
        const char32_t c = t.cps[i];
        if (c != kTokenSentinel && unicode::is_whitespace(c)) {
            if (!pending_space) space_origin = t.origin[i];
            pending_space = true;
            continue;
        }
        if (pending_space && !out.cps.empty()) out.push(U' ', space_origin);
        pending_space = false;
        out.push(c, t.origin[i]);
    }
    t = std::move(out);
}

Script normalize_pass(Tape& t, std::u32string_view raw, std::vector<MaskRecord>& masks) {
    protect_tokens(t);
    compose(t);
    mask_phones(t, raw, masks);
    const Script script = detect(t.cps);
    apply_arabic(t);
    if (script == Script::Latin) apply_latin(t);
    apply_squash(t);
    collapse_whitespace(t);
    return script;
}

Tape tape_from(std::string_view text) {
    Tape t = make_tape(unicode::decode(text));
    protect_tokens(t);
    return t;
}

}  // namespace

std::string_view to_string(Script script) {
    return script == Script::Arabic ? "arabic" : "latin";
}

std::optional<Script> parse_script(std::string_view name) {
    if (name == "arabic" || name == "ar") return Script::Arabic;
    if (name == "latin" || name == "arabizi" || name == "lat") return Script::Latin;
    return std::nullopt;
}

Script detect_script(std::string_view text) { return detect(tape_from(text).cps); }

std::string normalize_arabic(std::string_view text) {
    Tape t = tape_from(text);
    apply_arabic(t);
    return render(t);
}

std::string normalize_latin(std::string_view text) {
    Tape t = tape_from(text);
    apply_latin(t);
    return render(t);
}

std::string squash_repeats(std::string_view text) {
    Tape t = tape_from(text);
    apply_squash(t);
    return render(t);
}

MaskResult mask_phone(std::string_view text) {
    const std::u32string raw = unicode::decode(text);
    Tape t = make_tape(raw);
    protect_tokens(t);
    MaskResult result;
    mask_phones(t, raw, result.masks);
    result.text = render(t);
    return result;
}

NormalizedUtterance normalize(const RawUtterance& raw) { return normalize(raw.text); }

NormalizedUtterance normalize(std::string_view text) {
    const std::u32string raw = unicode::decode(text);
    Tape t = make_tape(raw);
    NormalizedUtterance out;
    out.script = normalize_pass(t, raw, out.masks);
    for (std::size_t pass = 1; pass < kMaxPasses; ++pass) {
        const std::u32string before = t.cps;
        const Script script = normalize_pass(t, raw, out.masks);
        if (t.cps == before && script == out.script) break;
        out.script = script;
    }
    std::sort(out.masks.begin(), out.masks.end(),
              [](const MaskRecord& a, const MaskRecord& b) { return a.begin < b.begin; });
    out.text = render(t);
    return out;
}

}  // namespace darja
