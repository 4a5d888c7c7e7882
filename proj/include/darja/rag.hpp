#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "darja/embed.hpp"
#include "darja/http_json.hpp"
#include "darja/knowledge.hpp"
#include "darja/normalize.hpp"

namespace darja {

struct RetrievalResult {
    Chunk chunk;
    double dense = 0.0;
    double lexical = 0.0;
    double final_score = 0.0;  // alpha * dense + (1 - alpha) * lexical
};

struct RagOptions {
    std::size_t k1 = 20;
    std::size_t k2 = 4;
    double alpha = 0.7;
    double min_score = 0.3;
    std::size_t max_tokens = 256;
    std::string fallback_text = "ma3andish l'ma3louma hadi, 3ayet l service client 3la 777.";
};

// Stage name → milliseconds.
using StageLatencies = std::map<std::string, double>;

class StageClock {
public:
    explicit StageClock(StageLatencies& sink) : sink_(sink) {}
    // Time since the previous lap (or construction) booked under `stage`.
    void lap(const std::string& stage);

private:
    StageLatencies& sink_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Top-k1 chunks by cosine of the Query-role embedding; final = dense.
std::vector<RetrievalResult> retrieve(std::string_view question, const EmbeddingProvider& provider,
                                      const KnowledgeSnapshot& snapshot, std::size_t k1 = 20);

// Whitespace tokens, each normalized on its own, edge punctuation stripped.
std::set<std::string> lexical_tokens(std::string_view text);
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Blend, drop final < min_score, sort by final desc (ties: dense desc, chunk id), keep k2.
std::vector<RetrievalResult> rerank(std::string_view question, std::vector<RetrievalResult> candidates,
                                    double alpha = 0.7, std::size_t k2 = 4, double min_score = 0.3);

struct Passage {
    std::size_t number = 0;  // 1-based
    std::string chunk_id;
    std::string label;  // "<chunk id> | <header>"
    std::string text;
};

struct PromptBundle {
    std::string instruction;
    std::vector<Passage> passages;
    std::string question;
    Script script = Script::Latin;
    std::string language_hint;
    std::string fallback_text;
    bool empty_context = false;

    std::vector<std::string> chunk_ids() const;
    // Full text sent to a remote model.
    std::string render() const;
};

std::string_view language_hint(Script script);

PromptBundle build_prompt(std::string_view question, const std::vector<RetrievalResult>& results, Script script,
                          std::string_view fallback_text);

struct Answer {
    std::string text;
    std::vector<std::string> sources;
    bool grounded = true;
};

class GenerationProvider {
public:
    virtual ~GenerationProvider() = default;
    // Throws ProviderError on failure.
    virtual std::string complete(const PromptBundle& bundle) const = 0;
};

// Returns, verbatim, the sentence of the top passage that shares the most
// question tokens (earliest wins ties).
class ExtractiveGenerator : public GenerationProvider {
public:
    explicit ExtractiveGenerator(std::chrono::milliseconds delay = std::chrono::milliseconds(0)) : delay_(delay) {}
    std::string complete(const PromptBundle& bundle) const override;

private:
    std::chrono::milliseconds delay_;
};

struct GenerationConfig {
    std::string kind = "extractive-mock";  // or "remote"
    std::string endpoint;
    int timeout_ms = 30000;
    std::size_t max_tokens = 256;
    int delay_ms = 0;  // mock only
};

// POST {"prompt", "max_tokens", "temperature": 0} → {"text"}; one retry on a retryable failure.
class RemoteGenerator : public GenerationProvider {
public:
    explicit RemoteGenerator(const GenerationConfig& config);
    std::string complete(const PromptBundle& bundle) const override;

private:
    http::Endpoint endpoint_;
    int timeout_ms_;
    std::size_t max_tokens_;
};

class CountingGenerator : public GenerationProvider {
public:
    explicit CountingGenerator(std::shared_ptr<const GenerationProvider> inner) : inner_(std::move(inner)) {}
    std::string complete(const PromptBundle& bundle) const override {
        calls_.fetch_add(1);
        return inner_->complete(bundle);
    }
    std::size_t calls() const { return calls_.load(); }

private:
    std::shared_ptr<const GenerationProvider> inner_;
    mutable std::atomic<std::size_t> calls_{0};
};

std::shared_ptr<const GenerationProvider> make_generation_provider(const GenerationConfig& config);

// Empty context short-circuits to the fallback without calling the provider.
// A provider failure yields the fallback with grounded = false.
Answer generate(const PromptBundle& bundle, const GenerationProvider& provider);

struct RagOutcome {
    Answer answer;
    std::vector<RetrievalResult> results;
    PromptBundle bundle;
};

// retrieve → rerank → build_prompt → generate, booking "retrieve", "rerank",
// "prompt", "generate" latencies. Retrieval failures fall back like generation failures.
RagOutcome answer_question(std::string_view question, Script script, const EmbeddingProvider& embedder,
                           const KnowledgeSnapshot& snapshot, const GenerationProvider& generator,
                           const RagOptions& options, StageLatencies* latencies = nullptr);

}  // namespace darja
