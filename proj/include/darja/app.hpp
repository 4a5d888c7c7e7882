#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "darja/config.hpp"
#include "darja/engine.hpp"

namespace darja {

ChunkOptions chunk_options(const EngineConfig& config);

// A single .md/.markdown/.txt file, or every such file in a directory (sorted).
std::vector<std::string> document_paths(const std::string& path);

// Chunks and indexes every document under `path`; returns total chunks added.
std::size_t ingest_path(KnowledgeBase& kb, const std::string& path, const ChunkOptions& options);

// `question<TAB>gold chunk id` lines ('#' comments); the gold column may be absent.
std::vector<std::pair<std::string, std::string>> load_questions(const std::string& path);

// Knowledge base from index.dir when it holds an index, otherwise built from knowledge.docs.
std::shared_ptr<KnowledgeBase> open_knowledge(const EngineConfig& config,
                                              std::shared_ptr<const EmbeddingProvider> embedder = nullptr);

// Model, templates, providers and knowledge wired into an Engine. Providers
// may be injected (tests wrap them in counters); null means build from config.
std::shared_ptr<Engine> build_engine(const EngineConfig& config,
                                     std::shared_ptr<const EmbeddingProvider> embedder = nullptr,
                                     std::shared_ptr<const GenerationProvider> generator = nullptr);

}  // namespace darja
