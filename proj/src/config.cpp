#include "darja/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& s) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw DataError("not a number: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw DataError("not a boolean: '" + s + "'");
}

struct Field {
    const char* key;
    bool is_path;
    std::function<std::string(const EngineConfig&)> get;
    std::function<void(EngineConfig&, const std::string&)> set;
};

#define STR_FIELD(key, member, path) \
    Field { key, path, [](const EngineConfig& c) { return c.member; }, [](EngineConfig& c, const std::string& v) { c.member = v; } }
#define NUM_FIELD(key, member, type)                                                                  \
    Field {                                                                                           \
        key, false, [](const EngineConfig& c) { return std::to_string(c.member); },                   \
            [](EngineConfig& c, const std::string& v) { c.member = parse_number<type>(v); }           \
    }
#define DBL_FIELD(key, member)                                                                        \
    Field {                                                                                           \
        key, false, [](const EngineConfig& c) { return format_double(c.member); },                    \
            [](EngineConfig& c, const std::string& v) { c.member = parse_number<double>(v); }         \
    }
#define BOOL_FIELD(key, member)                                                                       \
    Field {                                                                                           \
        key, false, [](const EngineConfig& c) { return std::string(c.member ? "true" : "false"); },   \
            [](EngineConfig& c, const std::string& v) { c.member = parse_bool(v); }                   \
    }

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (const auto x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
    return out;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        STR_FIELD("models.dir", models_dir, true),
        STR_FIELD("index.dir", index_dir, true),
        STR_FIELD("templates", templates, true),
        STR_FIELD("lexicon", lexicon, true),
        STR_FIELD("knowledge.docs", knowledge_docs, true),
        STR_FIELD("knowledge.offers", knowledge_offers, false),
        NUM_FIELD("knowledge.max_chunk_chars", max_chunk_chars, std::size_t),
        DBL_FIELD("router.tau", tau),
        STR_FIELD("router.knowledge_intents", knowledge_intents, false),
        NUM_FIELD("rag.k1", rag.k1, std::size_t),
        NUM_FIELD("rag.k2", rag.k2, std::size_t),
        DBL_FIELD("rag.alpha", rag.alpha),
        DBL_FIELD("rag.min_score", rag.min_score),
        STR_FIELD("rag.fallback", rag.fallback_text, false),
        STR_FIELD("embed.kind", embed.kind, false),
        STR_FIELD("embed.endpoint", embed.endpoint, false),
        NUM_FIELD("embed.dimension", embed.dimension, std::size_t),
        NUM_FIELD("embed.timeout_ms", embed.timeout_ms, int),
        NUM_FIELD("embed.seed", embed.seed, std::uint64_t),
        NUM_FIELD("embed.max_in_flight", embed.max_in_flight, std::size_t),
        NUM_FIELD("embed.retries", embed.retries, int),
        STR_FIELD("generate.kind", generate.kind, false),
        STR_FIELD("generate.endpoint", generate.endpoint, false),
        NUM_FIELD("generate.timeout_ms", generate.timeout_ms, int),
        NUM_FIELD("generate.max_tokens", generate.max_tokens, std::size_t),
        NUM_FIELD("generate.delay_ms", generate.delay_ms, int),
        NUM_FIELD("hnsw.m", hnsw.M, std::size_t),
        NUM_FIELD("hnsw.ef_construction", hnsw.ef_construction, std::size_t),
        NUM_FIELD("hnsw.ef_search", hnsw.ef_search, std::size_t),
        NUM_FIELD("hnsw.seed", hnsw.seed, std::uint64_t),
        STR_FIELD("server.host", host, false),
        NUM_FIELD("server.port", port, int),
        NUM_FIELD("session.ttl_minutes", session_ttl_minutes, int),
        STR_FIELD("train.dataset", train_dataset, true),
        STR_FIELD("bench.questions", bench_questions, true),
        NUM_FIELD("train.seed", train.seed, std::uint64_t),
        NUM_FIELD("train.min_per_intent", train.min_per_intent, std::size_t),
        NUM_FIELD("train.min_df", train.min_df, std::size_t),
        DBL_FIELD("train.l2", train.logreg.l2),
        DBL_FIELD("train.learning_rate", train.logreg.learning_rate),
        NUM_FIELD("train.batch_size", train.logreg.batch_size, std::size_t),
        NUM_FIELD("train.max_epochs", train.logreg.max_epochs, std::size_t),
        NUM_FIELD("train.patience", train.logreg.patience, std::size_t),
        BOOL_FIELD("train.mlp", train.with_mlp),
        Field{"train.mlp_hidden", false, [](const EngineConfig& c) { return join_sizes(c.train.mlp.hidden); },
              [](EngineConfig& c, const std::string& v) {
                  c.train.mlp.hidden.clear();
                  for (const auto& x : split_list(v)) c.train.mlp.hidden.push_back(parse_number<std::size_t>(x));
              }},
        DBL_FIELD("train.mlp_dropout", train.mlp.dropout),
        DBL_FIELD("train.mlp_learning_rate", train.mlp.learning_rate),
        DBL_FIELD("train.mlp_momentum", train.mlp.momentum),
        NUM_FIELD("train.mlp_max_epochs", train.mlp.max_epochs, std::size_t),
    };
    return f;
}

#undef STR_FIELD
#undef NUM_FIELD
#undef DBL_FIELD
#undef BOOL_FIELD

void check(bool ok, const std::string& message) {
    if (!ok) throw DataError("config: " + message);
}

}  // namespace

bool EngineConfig::operator==(const EngineConfig& other) const {
    for (const auto& f : fields())
        if (f.get(*this) != f.get(other)) return false;
    return true;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unicode::trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
}

std::string serialize_config(const EngineConfig& config) {
    std::string out;
    for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
    return out;
}

EngineConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir) {
    EngineConfig config;
    std::string line;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = unicode::trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const auto where = source + ":" + std::to_string(lineno) + ": ";
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) throw DataError(where + "expected key = value");
        const auto key = unicode::trim(trimmed.substr(0, eq));
        auto value = unicode::trim(trimmed.substr(eq + 1));
        const auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return key == f.key; });
        if (it == fields().end()) throw DataError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw DataError(where + "duplicate key '" + key + "'");
        if (it->is_path && !value.empty() && !base_dir.empty() && fs::path(value).is_relative())
            value = (fs::path(base_dir) / value).lexically_normal().string();
        try {
            it->set(config, value);
        } catch (const DataError& e) {
            throw DataError(where + key + ": " + e.what());
        }
    }
    return config;
}

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open config file");
    auto base = fs::path(path).parent_path().string();
    if (base.empty()) base = ".";
    return parse_config(in, path, base);
}

void validate_config(const EngineConfig& c, bool check_paths) {
    check(c.tau >= 0.0 && c.tau <= 1.0, "router.tau must lie in [0, 1]");
    check(c.rag.alpha >= 0.0 && c.rag.alpha <= 1.0, "rag.alpha must lie in [0, 1]");
    check(c.rag.min_score >= -1.0 && c.rag.min_score <= 1.0, "rag.min_score must lie in [-1, 1]");
    check(c.rag.k1 >= 1 && c.rag.k2 >= 1 && c.rag.k2 <= c.rag.k1, "need 1 <= rag.k2 <= rag.k1");
    check(c.embed.kind == "hash-mock" || c.embed.kind == "remote", "embed.kind must be hash-mock or remote");
    check(c.embed.kind != "remote" || !c.embed.endpoint.empty(), "embed.endpoint is required for a remote embedder");
    check(c.embed.dimension >= 8, "embed.dimension must be at least 8");
    check(c.embed.timeout_ms > 0 && c.embed.max_in_flight >= 1 && c.embed.retries >= 0, "bad embed limits");
    check(c.generate.kind == "extractive-mock" || c.generate.kind == "remote",
          "generate.kind must be extractive-mock or remote");
    check(c.generate.kind != "remote" || !c.generate.endpoint.empty(),
          "generate.endpoint is required for a remote generator");
    check(c.generate.timeout_ms > 0 && c.generate.delay_ms >= 0, "bad generate timings");
    check(c.hnsw.M >= 2 && c.hnsw.ef_construction >= 1 && c.hnsw.ef_search >= 1, "bad hnsw parameters");
    check(c.port >= 0 && c.port <= 65535, "server.port out of range");
    check(c.session_ttl_minutes >= 1, "session.ttl_minutes must be positive");
    check(c.max_chunk_chars >= 16, "knowledge.max_chunk_chars must be at least 16");
    check(c.train.min_per_intent >= 3, "train.min_per_intent must be at least 3");
    check(c.train.logreg.l2 >= 0.0 && c.train.logreg.learning_rate > 0.0, "bad train.l2 or train.learning_rate");
    check(c.train.mlp.dropout >= 0.0 && c.train.mlp.dropout < 1.0, "train.mlp_dropout must lie in [0, 1)");
    check(!c.train.mlp.hidden.empty(), "train.mlp_hidden must list at least one layer");
    if (!check_paths) return;
    check(fs::is_regular_file(c.templates), "templates file not found: " + c.templates);
    check(c.lexicon.empty() || fs::is_regular_file(c.lexicon), "lexicon not found: " + c.lexicon);
    check(fs::exists(c.knowledge_docs), "knowledge docs not found: " + c.knowledge_docs);
}

}  // namespace darja
