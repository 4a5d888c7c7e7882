#include "darja/rag.hpp"

#include <algorithm>
#include <thread>

#include <spdlog/spdlog.h>

#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

namespace {

// Sentence spans of `text`: split after terminal punctuation followed by
// whitespace, and at newlines. Returned trimmed, empties dropped.
std::vector<std::string> sentences(std::string_view text) {
    std::vector<std::string> out;
    const auto cps = unicode::decode(text);
    std::u32string cur;
    auto flush = [&] {
        auto s = unicode::trim(unicode::encode(cur));
        if (!s.empty()) out.push_back(std::move(s));
        cur.clear();
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t c = cps[i];
        if (c == U'\n') {
            flush();
            continue;
        }
        cur.push_back(c);
        const bool terminal = c == U'.' || c == U'!' || c == U'?' || c == U'؟' || c == U'…';
        if (terminal && i + 1 < cps.size() && unicode::is_whitespace(cps[i + 1])) flush();
    }
    flush();
    return out;
}

}  // namespace

void StageClock::lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_[stage] += std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
}

std::vector<RetrievalResult> retrieve(std::string_view question, const EmbeddingProvider& provider,
                                      const KnowledgeSnapshot& snapshot, std::size_t k1) {
    if (snapshot.index.empty()) return {};
    const auto q = provider.embed_one(embedding_text(question), EmbeddingRole::Query);
    std::vector<RetrievalResult> out;
    for (const auto& hit : snapshot.index.search(q, k1)) {
        RetrievalResult r;
        r.chunk = snapshot.chunks.at(hit.id);
        r.dense = hit.score;
        r.final_score = hit.score;
        out.push_back(std::move(r));
    }
    return out;
}

std::set<std::string> lexical_tokens(std::string_view text) {
    // Per token, so a token's form does not depend on the script of its neighbors.
    std::set<std::string> out;
    for (const auto& tok : unicode::split_whitespace(text)) {
        auto t = unicode::trim_punctuation(normalize(tok).text);
        if (!t.empty()) out.insert(std::move(t));
    }
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

std::vector<RetrievalResult> rerank(std::string_view question, std::vector<RetrievalResult> candidates, double alpha,
                                    std::size_t k2, double min_score) {
    const auto q = lexical_tokens(question);
    for (auto& c : candidates) {
        c.lexical = jaccard(q, lexical_tokens(content_of(c.chunk)));
        c.final_score = alpha * c.dense + (1.0 - alpha) * c.lexical;
    }
    std::erase_if(candidates, [&](const RetrievalResult& r) { return r.final_score < min_score; });
    std::stable_sort(candidates.begin(), candidates.end(), [](const RetrievalResult& a, const RetrievalResult& b) {
        if (a.final_score != b.final_score) return a.final_score > b.final_score;
        if (a.dense != b.dense) return a.dense > b.dense;
        return a.chunk.id < b.chunk.id;
    });
    if (candidates.size() > k2) candidates.resize(k2);
    return candidates;
}

std::vector<std::string> PromptBundle::chunk_ids() const {
    std::vector<std::string> ids;
    for (const auto& p : passages) ids.push_back(p.chunk_id);
    return ids;
}

std::string PromptBundle::render() const {
    std::string out = instruction + "\n" + language_hint + ".\n\n";
    for (const auto& p : passages) {
        out += "[" + std::to_string(p.number) + "] (" + p.label + ")\n" + p.text + "\n\n";
    }
    out += "Question: " + question + "\nAnswer:";
    return out;
}

std::string_view language_hint(Script script) {
    return script == Script::Arabic ? "respond in Arabic-script Darja" : "respond in Latin-script Darja";
}

PromptBundle build_prompt(std::string_view question, const std::vector<RetrievalResult>& results, Script script,
                          std::string_view fallback_text) {
    PromptBundle b;
    b.question = std::string(question);
    b.script = script;
    b.language_hint = std::string(language_hint(script));
    b.fallback_text = std::string(fallback_text);
    b.instruction =
        "You are a customer-support assistant for a mobile operator. Answer ONLY from the numbered passages "
        "below. If they do not contain the answer, reply with exactly this sentence: \"" +
        b.fallback_text + "\"";
    for (const auto& r : results) {
        Passage p;
        p.number = b.passages.size() + 1;
        p.chunk_id = r.chunk.id;
        p.label = r.chunk.header.empty() ? r.chunk.id : r.chunk.id + " | " + r.chunk.header;
        p.text = r.chunk.body;
        b.passages.push_back(std::move(p));
    }
    b.empty_context = b.passages.empty();
    return b;
}

std::string ExtractiveGenerator::complete(const PromptBundle& bundle) const {
    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
    if (bundle.passages.empty()) return bundle.fallback_text;
    const auto q = lexical_tokens(bundle.question);
    const auto candidates = sentences(bundle.passages.front().text);
    // Heading lines only repeat the offer name; answer from body sentences when there are any.
    const bool has_body = std::any_of(candidates.begin(), candidates.end(), [](const std::string& s) { return s[0] != '#'; });
    std::size_t best = 0, best_overlap = 0;
    bool chosen = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (has_body && candidates[i][0] == '#') continue;
        if (!chosen) {
            best = i;
            chosen = true;
        }
        std::size_t overlap = 0;
        for (const auto& t : lexical_tokens(candidates[i])) overlap += q.count(t);
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = i;
        }
    }
    return candidates.empty() ? bundle.fallback_text : candidates[best];
}

RemoteGenerator::RemoteGenerator(const GenerationConfig& config)
    : endpoint_(http::parse_endpoint(config.endpoint)), timeout_ms_(config.timeout_ms), max_tokens_(config.max_tokens) {}

std::string RemoteGenerator::complete(const PromptBundle& bundle) const {
    const nlohmann::json body{{"prompt", bundle.render()}, {"max_tokens", max_tokens_}, {"temperature", 0}};
    for (int attempt = 0;; ++attempt) {
        try {
            const auto reply = http::post_json(endpoint_, body, timeout_ms_);
            if (!reply.contains("text") || !reply["text"].is_string()) {
                throw ProviderError("generation reply has no text field", false);
            }
            return reply["text"].get<std::string>();
        } catch (const ProviderError& e) {
            if (!e.retryable() || attempt >= 1) throw;
            spdlog::warn("generation attempt failed, retrying: {}", e.what());
        }
    }
}

std::shared_ptr<const GenerationProvider> make_generation_provider(const GenerationConfig& config) {
    if (config.kind == "extractive-mock") {
        return std::make_shared<ExtractiveGenerator>(std::chrono::milliseconds(config.delay_ms));
    }
    if (config.kind == "remote") return std::make_shared<RemoteGenerator>(config);
    throw RuntimeError("unknown generation provider kind '" + config.kind + "'");
}

Answer generate(const PromptBundle& bundle, const GenerationProvider& provider) {
    Answer a;
    a.sources = bundle.chunk_ids();
    if (bundle.empty_context) {
        a.text = bundle.fallback_text;
        return a;
    }
    try {
        a.text = provider.complete(bundle);
    } catch (const ProviderError& e) {
        spdlog::error("generation failed, answering with fallback: {}", e.what());
        a.text = bundle.fallback_text;
        a.grounded = false;
    }
    return a;
}

RagOutcome answer_question(std::string_view question, Script script, const EmbeddingProvider& embedder,
                           const KnowledgeSnapshot& snapshot, const GenerationProvider& generator,
                           const RagOptions& options, StageLatencies* latencies) {
    StageLatencies local;
    StageClock clock(latencies ? *latencies : local);
    RagOutcome out;
    try {
        out.results = retrieve(question, embedder, snapshot, options.k1);
    } catch (const ProviderError& e) {
        spdlog::error("retrieval failed, answering with fallback: {}", e.what());
        clock.lap("retrieve");
        out.bundle = build_prompt(question, {}, script, options.fallback_text);
        out.answer = {options.fallback_text, {}, false};
        return out;
    }
    clock.lap("retrieve");
    out.results = rerank(question, std::move(out.results), options.alpha, options.k2, options.min_score);
    clock.lap("rerank");
    out.bundle = build_prompt(question, out.results, script, options.fallback_text);
    clock.lap("prompt");
    out.answer = generate(out.bundle, generator);
    clock.lap("generate");
    return out;
}

}  // namespace darja
