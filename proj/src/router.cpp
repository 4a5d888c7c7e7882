#include "darja/router.hpp"

#include <fstream>
#include <sstream>

#include "darja/corpus.hpp"
#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

std::string_view to_string(RoutePath path) { return path == RoutePath::Deterministic ? "nlu" : "rag"; }

RouteDecision route(const Prediction& prediction, double tau, const std::set<int>& knowledge_intents) {
    RouteDecision d;
    d.confidence = prediction.confidence;
    if (knowledge_intents.count(prediction.intent) == 0 && prediction.confidence >= tau) {
        d.path = RoutePath::Deterministic;
        d.intent = prediction.intent;
    }
    return d;
}

void TemplateRegistry::add(const std::string& intent, std::optional<Script> script, std::string text) {
    auto& e = entries_[intent];
    auto& slot = !script ? e.any : (*script == Script::Arabic ? e.arabic : e.latin);
    slot = std::move(text);
}

const std::string* TemplateRegistry::find(std::string_view intent, Script script) const {
    const auto it = entries_.find(intent);
    if (it == entries_.end()) return nullptr;
    const auto& e = it->second;
    const auto& same = script == Script::Arabic ? e.arabic : e.latin;
    const auto& other = script == Script::Arabic ? e.latin : e.arabic;
    if (same) return &*same;
    if (e.any) return &*e.any;
    if (other) return &*other;
    return nullptr;
}

bool TemplateRegistry::has(std::string_view intent) const { return entries_.find(intent) != entries_.end(); }

std::size_t TemplateRegistry::size() const { return entries_.size(); }

TemplateRegistry TemplateRegistry::parse(std::istream& in, const std::string& source) {
    TemplateRegistry reg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (unicode::trim(line).empty() || line[0] == '#') continue;
        const auto where = source + ":" + std::to_string(lineno) + ": ";
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw DataError(where + "expected intent<TAB>script<TAB>template");
        const auto intent = unicode::trim(line.substr(0, t1));
        const auto tag = unicode::trim(line.substr(t1 + 1, t2 - t1 - 1));
        auto text = unicode::trim(line.substr(t2 + 1));
        if (intent.empty() || text.empty()) throw DataError(where + "empty intent or template");
        std::optional<Script> script;
        if (tag != "any") {
            script = parse_script(tag);
            if (!script) throw DataError(where + "unknown script '" + tag + "' (arabic, latin or any)");
        }
        reg.add(intent, script, std::move(text));
    }
    return reg;
}

TemplateRegistry TemplateRegistry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open template file");
    return parse(in, path);
}

void TemplateRegistry::validate(const LabelCodec& labels, const std::set<std::string>& knowledge_intents) const {
    std::string missing;
    for (const auto& name : labels.names()) {
        if (knowledge_intents.count(name) || has(name)) continue;
        missing += (missing.empty() ? "" : ", ") + name;
    }
    if (!missing.empty()) throw DataError("intents without a response template: " + missing);
}

std::shared_ptr<DialogueSession> SessionStore::acquire(const std::string& id, Clock::time_point now) {
    std::lock_guard lock(mu_);
    if (now - last_sweep_ >= std::chrono::minutes(1)) {
        std::erase_if(sessions_, [&](const auto& kv) { return kv.first != id && now - kv.second->last_active > ttl_; });
        last_sweep_ = now;
    }
    auto& slot = sessions_[id];
    if (slot && now - slot->last_active > ttl_) slot.reset();
    if (!slot) {
        slot = std::make_shared<DialogueSession>();
        slot->id = id;
        slot->created = now;
    }
    slot->last_active = now;
    return slot;
}

std::shared_ptr<DialogueSession> SessionStore::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionStore::evict_expired(Clock::time_point now) {
    std::lock_guard lock(mu_);
    return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_active > ttl_; });
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

}  // namespace darja
