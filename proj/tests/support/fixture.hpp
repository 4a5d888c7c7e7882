#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "darja/ingest.hpp"

namespace darja::test_support {

inline std::string data_path(const std::string& rel) { return std::string(DARJA_DATA_DIR) + "/" + rel; }

inline ChunkOptions fixture_chunk_options() {
    ChunkOptions o;
    o.offers = {"pixx", "win", "sama", "safar", "hadra", "nejma"};
    return o;
}

// (question, gold chunk id) pairs; '#' lines are comments.
inline std::vector<std::pair<std::string, std::string>> fixture_questions() {
    std::ifstream in(data_path("knowledge/questions.tsv"));
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

}  // namespace darja::test_support
