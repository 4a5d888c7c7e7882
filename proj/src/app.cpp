#include "darja/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <spdlog/spdlog.h>

#include "darja/error.hpp"

namespace darja {

namespace fs = std::filesystem;

ChunkOptions chunk_options(const EngineConfig& config) {
    ChunkOptions o;
    o.offers = parse_offer_list(config.knowledge_offers);
    o.max_chunk_chars = config.max_chunk_chars;
    return o;
}

std::vector<std::string> document_paths(const std::string& path) {
    static const std::vector<std::string> exts = {".md", ".markdown", ".txt"};
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) return {path};
    if (!fs::is_directory(path, ec)) throw DataError(path + ": no such file or directory");
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (std::find(exts.begin(), exts.end(), ext) != exts.end()) out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw DataError(path + ": no .md or .txt documents");
    return out;
}

std::size_t ingest_path(KnowledgeBase& kb, const std::string& path, const ChunkOptions& options) {
    std::size_t total = 0;
    for (const auto& file : document_paths(path)) total += kb.index_document(load_document(file), options);
    return total;
}

std::vector<std::pair<std::string, std::string>> load_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open question file");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            out.emplace_back(line, "");
        } else {
            out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
    }
    return out;
}

std::shared_ptr<KnowledgeBase> open_knowledge(const EngineConfig& config,
                                              std::shared_ptr<const EmbeddingProvider> embedder) {
    if (!embedder) embedder = make_embedding_provider(config.embed);
    auto kb = std::make_shared<KnowledgeBase>(std::move(embedder), config.hnsw);
    if (!config.index_dir.empty() && fs::exists(fs::path(config.index_dir) / "index.hns")) {
        kb->load(config.index_dir);
        spdlog::info("loaded knowledge index from {}", config.index_dir);
    } else {
        const auto n = ingest_path(*kb, config.knowledge_docs, chunk_options(config));
        spdlog::info("indexed {} chunks from {}", n, config.knowledge_docs);
    }
    return kb;
}

std::shared_ptr<Engine> build_engine(const EngineConfig& config, std::shared_ptr<const EmbeddingProvider> embedder,
                                     std::shared_ptr<const GenerationProvider> generator) {
    validate_config(config, true);
    if (!fs::exists(fs::path(config.models_dir) / "model.lrm"))
        throw DataError(config.models_dir + ": no trained model (run `darja train` first)");
    EngineParts parts;
    parts.model = std::make_shared<const NluModel>(NluModel::load(config.models_dir));
    parts.templates = TemplateRegistry::load(config.templates);
    const auto intents = split_list(config.knowledge_intents);
    parts.knowledge_intents = {intents.begin(), intents.end()};
    parts.tau = config.tau;
    parts.knowledge = open_knowledge(config, std::move(embedder));
    parts.generator = generator ? std::move(generator) : make_generation_provider(config.generate);
    parts.rag = config.rag;
    parts.session_ttl = std::chrono::minutes(config.session_ttl_minutes);
    return std::make_shared<Engine>(std::move(parts));
}

}  // namespace darja
