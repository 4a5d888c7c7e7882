#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "darja/classify.hpp"
#include "darja/normalize.hpp"

namespace darja {

class LabelCodec;

enum class RoutePath { Deterministic, Knowledge };

// "nlu" / "rag", as reported to clients.
std::string_view to_string(RoutePath path);

struct RouteDecision {
    RoutePath path = RoutePath::Knowledge;
    int intent = -1;  // meaningful on the deterministic path only
    double confidence = 0.0;
};

// Knowledge intents always go to retrieval; otherwise confidence >= tau
// answers from a template.
RouteDecision route(const Prediction& prediction, double tau, const std::set<int>& knowledge_intents);

// (intent, script) → response text; a template with no script serves both.
class TemplateRegistry {
public:
    void add(const std::string& intent, std::optional<Script> script, std::string text);

    // Exact script first, then the script-agnostic entry, then the other script.
    const std::string* find(std::string_view intent, Script script) const;
    bool has(std::string_view intent) const;
    std::size_t size() const;

    // `intent<TAB>script<TAB>template`, script one of arabic|latin|any.
    static TemplateRegistry parse(std::istream& in, const std::string& source);
    static TemplateRegistry load(const std::string& path);

    // Throws DataError listing every non-knowledge intent without a template.
    void validate(const LabelCodec& labels, const std::set<std::string>& knowledge_intents) const;

private:
    struct Entry {
        std::optional<std::string> arabic, latin, any;
    };
    std::map<std::string, Entry, std::less<>> entries_;
};

struct Turn {
    std::string user_text;
    std::string reply;
    RouteDecision route;
    std::chrono::system_clock::time_point at;
};

struct DialogueSession {
    std::string id;
    std::chrono::steady_clock::time_point created;
    std::chrono::steady_clock::time_point last_active;
    std::vector<Turn> history;  // append-only
    std::mutex mu;              // held for the whole of a turn
};

// In-memory sessions evicted after `ttl` of inactivity.
class SessionStore {
public:
    using Clock = std::chrono::steady_clock;

    explicit SessionStore(std::chrono::minutes ttl = std::chrono::minutes(30)) : ttl_(ttl) {}

    // Existing live session or a fresh one. Expired sessions are swept at most once a minute.
    std::shared_ptr<DialogueSession> acquire(const std::string& id, Clock::time_point now = Clock::now());
    std::shared_ptr<DialogueSession> find(const std::string& id) const;
    std::size_t evict_expired(Clock::time_point now = Clock::now());
    std::size_t size() const;
    std::chrono::minutes ttl() const { return ttl_; }

private:
    std::chrono::minutes ttl_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<DialogueSession>> sessions_;
    Clock::time_point last_sweep_{};
};

}  // namespace darja
