#include "darja/engine.hpp"

#include <spdlog/spdlog.h>

#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

Engine::Engine(EngineParts parts) : parts_(std::move(parts)), sessions_(parts_.session_ttl) {
    if (!parts_.model) throw RuntimeError("engine: no model");
    if (!parts_.knowledge) throw RuntimeError("engine: no knowledge base");
    if (!parts_.generator) throw RuntimeError("engine: no generation provider");
    if (parts_.tau < 0.0 || parts_.tau > 1.0) throw DataError("router.tau must lie in [0, 1]");
    const auto& labels = parts_.model->labels;
    for (const auto& name : parts_.knowledge_intents) {
        if (!labels.contains(name)) throw DataError("knowledge intent '" + name + "' is not a model label");
        knowledge_ids_.insert(labels.encode(name));
    }
    parts_.templates.validate(labels, parts_.knowledge_intents);
}

std::shared_ptr<const NluModel> Engine::model() const { return parts_.model; }

Classification Engine::classify(std::string_view text) const {
    if (unicode::trim(text).empty()) throw DataError("text is empty");
    Classification c;
    const auto features = parts_.model->featurize(text, &c.normalized);
    c.prediction = parts_.model->predict(features);
    c.intent = parts_.model->labels.decode(c.prediction.intent);
    return c;
}

BotReply Engine::handle_turn(const std::string& session_id, std::string_view text) {
    if (unicode::trim(text).empty()) throw DataError("text is empty");
    const auto started = std::chrono::steady_clock::now();
    auto session = sessions_.acquire(session_id);
    std::lock_guard turn_lock(session->mu);

    BotReply reply;
    StageClock clock(reply.latency);
    // Phone numbers never reach the history or the providers.
    const auto masked = mask_phone(text).text;
    const auto& model = *parts_.model;
    const auto normalized = normalize(masked);
    reply.script = normalized.script;
    clock.lap("normalize");
    const auto features = model.vocab.transform(normalized.text);
    clock.lap("featurize");
    const auto prediction = model.predict(features);
    clock.lap("classify");
    reply.route = route(prediction, parts_.tau, knowledge_ids_);
    clock.lap("route");

    const std::string* templ = nullptr;
    if (reply.route.path == RoutePath::Deterministic) {
        const auto& name = model.labels.decode(reply.route.intent);
        templ = parts_.templates.find(name, reply.script);
        if (templ) {
            reply.intent = name;
            reply.text = *templ;
        } else {
            spdlog::warn("no template for intent {}; answering from knowledge", name);
            reply.route.path = RoutePath::Knowledge;
            reply.route.intent = -1;
        }
        clock.lap("template");
    }
    if (!templ) {
        const auto snapshot = parts_.knowledge->snapshot();
        auto outcome = answer_question(masked, reply.script, parts_.knowledge->provider(), *snapshot,
                                       *parts_.generator, parts_.rag, &reply.latency);
        reply.text = std::move(outcome.answer.text);
        reply.sources = std::move(outcome.answer.sources);
        reply.grounded = outcome.answer.grounded;
    }
    reply.latency["total"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    Turn turn;
    turn.user_text = masked;
    turn.reply = reply.text;
    turn.route = reply.route;
    turn.at = std::chrono::system_clock::now();
    session->history.push_back(std::move(turn));
    return reply;
}

std::size_t Engine::ingest(const SourceDocument& doc, const ChunkOptions& options) {
    return parts_.knowledge->index_document(doc, options);
}

}  // namespace darja
