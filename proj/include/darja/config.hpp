#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "darja/embed.hpp"
#include "darja/rag.hpp"
#include "darja/training.hpp"
#include "darja/vecindex.hpp"

namespace darja {

struct EngineConfig {
    // paths
    std::string models_dir = "models";
    std::string index_dir = "index";
    std::string templates = "data/templates.tsv";
    std::string lexicon;  // optional
    std::string knowledge_docs = "data/knowledge/offers.md";  // file or directory
    std::string knowledge_offers = "pixx,win,sama,safar,hadra,nejma";
    std::string train_dataset = "data/synth/corpus.tsv";
    std::string bench_questions = "data/knowledge/questions.tsv";

    double tau = 0.7;
    std::string knowledge_intents = "offer_info";
    RagOptions rag;
    ProviderConfig embed;
    GenerationConfig generate;
    HnswParams hnsw;
    std::size_t max_chunk_chars = 1200;

    std::string host = "127.0.0.1";
    int port = 8080;
    int session_ttl_minutes = 30;

    TrainOptions train;

    bool operator==(const EngineConfig& other) const;
};

// Every key with its current value, one `key = value` per line.
std::string serialize_config(const EngineConfig& config);

// `key = value` lines, '#' comments. Unknown keys and bad values throw
// DataError naming the line. Relative paths are resolved against base_dir
// when it is non-empty.
EngineConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir = "");
EngineConfig load_config(const std::string& path);

// Range checks; with check_paths also requires the templates file, the
// lexicon (when set) and the knowledge docs to exist.
void validate_config(const EngineConfig& config, bool check_paths);

std::vector<std::string> config_keys();
std::vector<std::string> split_list(const std::string& csv);

}  // namespace darja
