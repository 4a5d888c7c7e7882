#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace darja {

enum class DocFormat { Plain, Markdown };

struct SourceDocument {
    std::string id;
    std::string title;
    std::string body;
    DocFormat format = DocFormat::Markdown;
};

struct Chunk {
    std::string id;  // doc id + '#' + ordinal
    std::string doc_id;
    std::string header;  // "" for the preamble
    std::string body;
    std::size_t begin = 0;  // byte span into the document body
    std::size_t end = 0;
    std::size_t order = 0;
    bool prefixed = false;  // body starts with header_prefix(header)

    bool operator==(const Chunk&) const = default;
};

struct ChunkOptions {
    std::vector<std::string> offers;  // matched case-insensitively at line start
    bool markdown_headings = true;
    std::size_t max_chunk_chars = 1200;
};

// "«header» — "
std::string header_prefix(std::string_view header);
// Chunk body with any injected header prefix removed.
std::string_view content_of(const Chunk& chunk);

// Throws DataError on an empty document.
std::vector<Chunk> chunk_by_offer(const SourceDocument& doc, const ChunkOptions& options);

// Id from the file stem, title from the first markdown heading or the stem,
// format from the extension (.md/.markdown → markdown).
SourceDocument load_document(const std::string& path);

// Comma-separated offer names, trimmed, empties dropped.
std::vector<std::string> parse_offer_list(std::string_view csv);

}  // namespace darja
