#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "darja/embed.hpp"
#include "darja/ingest.hpp"
#include "darja/vecindex.hpp"

namespace darja {

// Immutable view served to readers. Index id i refers to chunks[i].
struct KnowledgeSnapshot {
    HnswIndex index;
    std::vector<Chunk> chunks;

    explicit KnowledgeSnapshot(HnswIndex idx) : index(std::move(idx)) {}
    const Chunk* find(const std::string& chunk_id) const;
};

// Text that gets embedded for a chunk or a question: the normalized surface
// form, so casing, elongation and letter variants do not split the space.
std::string embedding_text(std::string_view text);

// Ingestion is serialized; readers keep the snapshot they took until they drop it.
class KnowledgeBase {
public:
    KnowledgeBase(std::shared_ptr<const EmbeddingProvider> provider, HnswParams params = {});

    std::shared_ptr<const KnowledgeSnapshot> snapshot() const;

    // Replaces any chunks previously ingested under doc.id. The new index is
    // built off to the side and published only on success.
    std::size_t index_document(const SourceDocument& doc, const ChunkOptions& options);

    const EmbeddingProvider& provider() const { return *provider_; }

    // <dir>/index.hns and <dir>/chunks.jsonl
    void save(const std::string& dir) const;
    void load(const std::string& dir);

private:
    void publish(std::shared_ptr<const KnowledgeSnapshot> next);

    std::shared_ptr<const EmbeddingProvider> provider_;
    HnswParams params_;
    mutable std::mutex snapshot_mu_;
    std::mutex ingest_mu_;
    std::shared_ptr<const KnowledgeSnapshot> current_;
};

}  // namespace darja
