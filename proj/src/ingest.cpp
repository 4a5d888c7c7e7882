#include "darja/ingest.hpp"

#include <filesystem>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

namespace {

struct Line {
    std::size_t begin;
    std::size_t end;  // excludes the newline
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back({pos, end});
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return lines;
}

std::string_view markdown_heading(std::string_view line) {
    std::size_t hashes = 0;
    while (hashes < line.size() && line[hashes] == '#') ++hashes;
    if (hashes == 0 || hashes > 6 || hashes == line.size() || (line[hashes] != ' ' && line[hashes] != '\t')) return {};
    auto rest = line.substr(hashes);
    while (!rest.empty() && (rest.back() == '#' || rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r')) {
        rest.remove_suffix(1);
    }
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    return rest;
}

bool starts_with_word(std::u32string_view line, std::u32string_view word) {
    if (word.empty() || line.size() < word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (unicode::to_lower(line[i]) != unicode::to_lower(word[i])) return false;
    }
    if (line.size() == word.size()) return true;
    const char32_t next = line[word.size()];
    return !unicode::is_letter(next) && !unicode::is_ascii_digit(next) && next != U'_';
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == U'؟' || c == U'…'; }

// Byte offsets where sentences start inside `text` (always includes 0).
// A sentence ends after terminal punctuation followed by whitespace, or at a
// newline; trailing whitespace stays with the sentence it follows.
std::vector<std::size_t> sentence_starts(std::string_view text) {
    std::vector<std::size_t> starts{0};
    const auto cps = unicode::decode(text);
    std::size_t byte = 0;
    std::vector<std::size_t> offsets;
    offsets.reserve(cps.size() + 1);
    for (char32_t c : cps) {
        offsets.push_back(byte);
        std::string tmp;
        unicode::append(tmp, c);
        byte += tmp.size();
    }
    offsets.push_back(byte);

    for (std::size_t i = 0; i < cps.size(); ++i) {
        const bool newline = cps[i] == U'\n';
        const bool terminal = is_terminal(cps[i]) && i + 1 < cps.size() && unicode::is_whitespace(cps[i + 1]);
        if (!newline && !terminal) continue;
        std::size_t j = i + 1;
        while (j < cps.size() && unicode::is_whitespace(cps[j])) ++j;
        if (j < cps.size() && offsets[j] != starts.back()) starts.push_back(offsets[j]);
        i = j - 1;
    }
    return starts;
}

// Splits one over-long piece at whitespace so each part has at most `cap` codepoints.
void hard_split(std::string_view piece, std::size_t base, std::size_t cap, std::vector<std::pair<std::size_t, std::size_t>>& out) {
    const auto cps = unicode::decode(piece);
    std::size_t start_cp = 0, start_byte = 0;
    while (cps.size() - start_cp > cap) {
        std::size_t cut = start_cp + cap;
        for (std::size_t k = start_cp + cap; k > start_cp + cap / 2; --k) {
            if (unicode::is_whitespace(cps[k])) {
                cut = k;
                break;
            }
        }
        const auto len = unicode::encode(std::u32string_view(cps).substr(start_cp, cut - start_cp)).size();
        out.emplace_back(base + start_byte, base + start_byte + len);
        start_byte += len;
        start_cp = cut;
    }
    out.emplace_back(base + start_byte, base + piece.size());
}

struct Section {
    std::string header;
    std::size_t begin;
    std::size_t end;
};

}  // namespace

std::string header_prefix(std::string_view header) { return "«" + std::string(header) + "» — "; }

std::string_view content_of(const Chunk& chunk) {
    std::string_view body = chunk.body;
    if (chunk.prefixed) body.remove_prefix(header_prefix(chunk.header).size());
    return body;
}

std::vector<Chunk> chunk_by_offer(const SourceDocument& doc, const ChunkOptions& options) {
    if (unicode::trim(doc.body).empty()) throw DataError("document '" + doc.id + "' is empty");
    if (options.max_chunk_chars < 16) throw DataError("max_chunk_chars must be at least 16");
    const std::string_view body = doc.body;
    const bool headings = options.markdown_headings && doc.format == DocFormat::Markdown;

    std::vector<std::u32string> offers;
    for (const auto& o : options.offers) offers.push_back(unicode::decode(o));

    std::vector<Section> sections{{"", 0, body.size()}};
    for (const auto& line : split_lines(body)) {
        const auto text = body.substr(line.begin, line.end - line.begin);
        std::string header;
        if (headings) header = std::string(markdown_heading(text));
        if (header.empty()) {
            const auto trimmed = unicode::trim(text);
            const auto cps = unicode::decode(trimmed);
            for (const auto& o : offers) {
                if (starts_with_word(cps, o)) {
                    // The offer word as written; the rest of the line stays body text.
                    header = unicode::encode(std::u32string_view(cps).substr(0, o.size()));
                    break;
                }
            }
        }
        if (header.empty()) continue;
        sections.back().end = line.begin;
        sections.push_back({header, line.begin, body.size()});
    }
    if (unicode::trim(body.substr(sections[0].begin, sections[0].end - sections[0].begin)).empty()) {
        sections.erase(sections.begin());
    }

    std::vector<Chunk> chunks;
    auto emit = [&](const Section& s, std::size_t b, std::size_t e, bool prefixed) {
        Chunk c;
        c.doc_id = doc.id;
        c.order = chunks.size();
        c.id = doc.id + "#" + std::to_string(c.order);
        c.header = s.header;
        c.begin = b;
        c.end = e;
        c.prefixed = prefixed;
        c.body = (prefixed ? header_prefix(s.header) : std::string()) + unicode::trim(body.substr(b, e - b));
        chunks.push_back(std::move(c));
    };

    for (const auto& s : sections) {
        const auto text = body.substr(s.begin, s.end - s.begin);
        if (unicode::length(unicode::trim(text)) <= options.max_chunk_chars) {
            emit(s, s.begin, s.end, false);
            continue;
        }
        const auto prefix_len = unicode::length(header_prefix(s.header));
        const std::size_t cap = options.max_chunk_chars > prefix_len + 8 ? options.max_chunk_chars - prefix_len : 8;

        auto starts = sentence_starts(text);
        starts.push_back(text.size());
        std::vector<std::pair<std::size_t, std::size_t>> pieces;
        for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
            const auto piece = text.substr(starts[i], starts[i + 1] - starts[i]);
            if (unicode::length(piece) > cap) {
                hard_split(piece, s.begin + starts[i], cap, pieces);
            } else {
                pieces.emplace_back(s.begin + starts[i], s.begin + starts[i + 1]);
            }
        }

        std::size_t b = pieces.front().first, e = b, len = 0;
        for (const auto& [pb, pe] : pieces) {
            const auto plen = unicode::length(body.substr(pb, pe - pb));
            if (e > b && len + plen > cap) {
                emit(s, b, e, true);
                b = pb;
                len = 0;
            }
            e = pe;
            len += plen;
        }
        emit(s, b, e, true);
    }
    return chunks;
}

SourceDocument load_document(const std::string& path) {
    const std::filesystem::path p(path);
    SourceDocument doc;
    doc.id = p.stem().string();
    doc.body = io::read_file(path);
    const auto ext = p.extension().string();
    doc.format = (ext == ".md" || ext == ".markdown") ? DocFormat::Markdown : DocFormat::Plain;
    doc.title = doc.id;
    if (doc.format == DocFormat::Markdown) {
        for (const auto& line : split_lines(doc.body)) {
            const auto h = markdown_heading(std::string_view(doc.body).substr(line.begin, line.end - line.begin));
            if (!h.empty()) {
                doc.title = std::string(h);
                break;
            }
        }
    }
    if (unicode::trim(doc.body).empty()) throw DataError(path + ": document is empty");
    return doc;
}

std::vector<std::string> parse_offer_list(std::string_view csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const auto item = unicode::trim(csv.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace darja
