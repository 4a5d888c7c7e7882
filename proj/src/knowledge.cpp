#include "darja/knowledge.hpp"

#include <filesystem>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/normalize.hpp"

namespace darja {

const Chunk* KnowledgeSnapshot::find(const std::string& chunk_id) const {
    for (const auto& c : chunks) {
        if (c.id == chunk_id) return &c;
    }
    return nullptr;
}

std::string embedding_text(std::string_view text) {
    auto n = normalize(text).text;
    return n.empty() ? std::string(text) : n;
}

KnowledgeBase::KnowledgeBase(std::shared_ptr<const EmbeddingProvider> provider, HnswParams params)
    : provider_(std::move(provider)), params_(params) {
    current_ = std::make_shared<KnowledgeSnapshot>(HnswIndex(provider_->dimension(), params_));
}

std::shared_ptr<const KnowledgeSnapshot> KnowledgeBase::snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return current_;
}

void KnowledgeBase::publish(std::shared_ptr<const KnowledgeSnapshot> next) {
    std::lock_guard lock(snapshot_mu_);
    current_ = std::move(next);
}

std::size_t KnowledgeBase::index_document(const SourceDocument& doc, const ChunkOptions& options) {
    std::lock_guard ingest(ingest_mu_);
    auto fresh = chunk_by_offer(doc, options);

    std::vector<std::string> texts;
    texts.reserve(fresh.size());
    for (const auto& c : fresh) texts.push_back(embedding_text(c.body));
    const auto vectors = provider_->embed(texts, EmbeddingRole::Passage);
    if (vectors.size() != fresh.size()) {
        throw ProviderError("embedding provider returned " + std::to_string(vectors.size()) + " vectors for " +
                                std::to_string(fresh.size()) + " chunks",
                            false);
    }

    const auto old = snapshot();
    auto next = std::make_shared<KnowledgeSnapshot>(HnswIndex(provider_->dimension(), params_));
    for (std::size_t i = 0; i < old->chunks.size(); ++i) {
        if (old->chunks[i].doc_id == doc.id) continue;
        next->index.insert(next->chunks.size(), old->index.vector(i), old->chunks[i].id);
        next->chunks.push_back(old->chunks[i]);
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        if (vectors[i].size() != provider_->dimension()) {
            throw ProviderError("embedding for chunk " + fresh[i].id + " has the wrong dimension", false);
        }
        next->index.insert(next->chunks.size(), vectors[i], fresh[i].id);
        next->chunks.push_back(std::move(fresh[i]));
    }
    publish(std::move(next));
    spdlog::info("indexed document '{}' as {} chunks", doc.id, vectors.size());
    return vectors.size();
}

void KnowledgeBase::save(const std::string& dir) const {
    const auto snap = snapshot();
    std::filesystem::create_directories(dir);
    snap->index.save((std::filesystem::path(dir) / "index.hns").string());
    std::string lines;
    for (std::size_t i = 0; i < snap->chunks.size(); ++i) {
        const auto& c = snap->chunks[i];
        nlohmann::json j{{"index_id", i},      {"id", c.id},       {"doc_id", c.doc_id}, {"header", c.header},
                         {"body", c.body},     {"begin", c.begin}, {"end", c.end},       {"order", c.order},
                         {"prefixed", c.prefixed}};
        lines += j.dump() + "\n";
    }
    io::write_file_atomic((std::filesystem::path(dir) / "chunks.jsonl").string(), lines);
}

void KnowledgeBase::load(const std::string& dir) {
    std::lock_guard ingest(ingest_mu_);
    const auto index_path = (std::filesystem::path(dir) / "index.hns").string();
    const auto chunks_path = (std::filesystem::path(dir) / "chunks.jsonl").string();
    auto next = std::make_shared<KnowledgeSnapshot>(HnswIndex::load(index_path));
    if (next->index.dimension() != provider_->dimension()) {
        throw RuntimeError(index_path + ": index dimension " + std::to_string(next->index.dimension()) +
                           " does not match embedding provider dimension " + std::to_string(provider_->dimension()));
    }
    std::istringstream in(io::read_file(chunks_path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Chunk c;
            c.id = j.at("id");
            c.doc_id = j.at("doc_id");
            c.header = j.at("header");
            c.body = j.at("body");
            c.begin = j.at("begin");
            c.end = j.at("end");
            c.order = j.at("order");
            c.prefixed = j.at("prefixed");
            if (j.at("index_id").get<std::size_t>() != next->chunks.size()) throw DataError("index ids out of order");
            next->chunks.push_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(chunks_path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(chunks_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (next->chunks.size() != next->index.size()) {
        throw DataError(chunks_path + ": " + std::to_string(next->chunks.size()) + " chunks for " +
                        std::to_string(next->index.size()) + " index entries");
    }
    for (std::size_t i = 0; i < next->chunks.size(); ++i) {
        if (!next->index.contains(i) || next->index.metadata(i) != next->chunks[i].id) {
            throw DataError(chunks_path + ": chunk " + next->chunks[i].id + " does not match index entry " +
                            std::to_string(i));
        }
    }
    publish(std::move(next));
}

}  // namespace darja
