#pragma once

#include <unistd.h>

#include <filesystem>
#include <memory>
#include <string>

#include "darja/app.hpp"
#include "darja/synth.hpp"
#include "fixture.hpp"

namespace darja::test_support {

// A model trained once per process on the synthetic corpus, saved to a temp dir.
inline const std::string& trained_model_dir() {
    static const std::string dir = [] {
        const auto p = std::filesystem::temp_directory_path() / ("darja_models_" + std::to_string(::getpid()));
        std::filesystem::remove_all(p);
        TrainOptions o;
        o.logreg.learning_rate = 2.0;
        train_pipeline(synthesize_corpus({}), {}, o).model.save(p.string());
        return p.string();
    }();
    return dir;
}

inline EngineConfig fixture_config() {
    EngineConfig c;
    c.models_dir = trained_model_dir();
    c.index_dir.clear();
    c.templates = data_path("templates.tsv");
    c.knowledge_docs = data_path("knowledge/offers.md");
    c.bench_questions = data_path("knowledge/questions.tsv");
    c.rag.min_score = 0.1;
    return c;
}

struct CountedEngine {
    std::shared_ptr<CountingEmbeddingProvider> embedder;
    std::shared_ptr<CountingGenerator> generator;
    std::shared_ptr<Engine> engine;
};

inline CountedEngine counted_engine(const EngineConfig& config = fixture_config(), int delay_ms = 0) {
    CountedEngine e;
    e.embedder = std::make_shared<CountingEmbeddingProvider>(make_embedding_provider(config.embed));
    e.generator = std::make_shared<CountingGenerator>(
        std::make_shared<ExtractiveGenerator>(std::chrono::milliseconds(delay_ms)));
    e.engine = build_engine(config, e.embedder, e.generator);
    return e;
}

}  // namespace darja::test_support
