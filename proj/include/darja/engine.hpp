#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "darja/knowledge.hpp"
#include "darja/rag.hpp"
#include "darja/router.hpp"
#include "darja/training.hpp"

namespace darja {

struct BotReply {
    std::string text;
    RouteDecision route;
    std::optional<std::string> intent;  // deterministic path only
    std::vector<std::string> sources;   // knowledge path only
    StageLatencies latency;             // includes "total"
    Script script = Script::Latin;
    bool grounded = true;
};

struct Classification {
    Prediction prediction;
    std::string intent;
    NormalizedUtterance normalized;
};

struct EngineParts {
    std::shared_ptr<const NluModel> model;
    TemplateRegistry templates;
    std::set<std::string> knowledge_intents;
    double tau = 0.7;
    std::shared_ptr<KnowledgeBase> knowledge;
    std::shared_ptr<const GenerationProvider> generator;
    RagOptions rag;
    std::chrono::minutes session_ttl{30};
};

// The online dialogue path: classify, route, then answer from a template or
// from the knowledge base. Safe to call from many threads.
class Engine {
public:
    // Throws DataError when templates do not cover the model's routine
    // intents or a knowledge intent is unknown to the model.
    explicit Engine(EngineParts parts);

    // Throws DataError on blank text.
    BotReply handle_turn(const std::string& session_id, std::string_view text);
    Classification classify(std::string_view text) const;

    std::size_t ingest(const SourceDocument& doc, const ChunkOptions& options);

    std::shared_ptr<const NluModel> model() const;
    KnowledgeBase& knowledge() { return *parts_.knowledge; }
    SessionStore& sessions() { return sessions_; }
    const std::set<int>& knowledge_ids() const { return knowledge_ids_; }
    double tau() const { return parts_.tau; }

private:
    EngineParts parts_;
    std::set<int> knowledge_ids_;
    SessionStore sessions_;
};

}  // namespace darja
