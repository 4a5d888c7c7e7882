#include "darja/embed.hpp"

#include <cmath>

#include "darja/error.hpp"
#include "darja/rng.hpp"
#include "darja/unicode.hpp"

namespace darja {

std::string_view role_prefix(EmbeddingRole role) {
    return role == EmbeddingRole::Query ? "query: " : "passage: ";
}

std::string_view to_string(EmbeddingRole role) { return role == EmbeddingRole::Query ? "query" : "passage"; }

void l2_normalize(EmbeddingVector& v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    if (sq == 0.0) {
        if (!v.empty()) v[0] = 1.0f;
        return;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (float& x : v) x = static_cast<float>(x * inv);
}

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text, EmbeddingRole role) const {
    auto out = embed(std::span<const std::string>(&text, 1), role);
    return std::move(out.front());
}

HashMockProvider::HashMockProvider(std::size_t dimension, std::uint64_t seed) : dim_(dimension), seed_(seed) {
    if (dim_ < 8) throw RuntimeError("embedding dimension must be at least 8");
}

std::uint64_t HashMockProvider::hash(std::string_view gram) const {
    // FNV-1a with a seed-dependent offset basis, then a full-avalanche finish.
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed_);
    for (unsigned char c : gram) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

std::vector<EmbeddingVector> HashMockProvider::embed(std::span<const std::string> texts, EmbeddingRole role) const {
    if (texts.empty()) throw DataError("embed: empty batch");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        const auto cps = unicode::decode(std::string(role_prefix(role)) + text);
        std::vector<double> acc(dim_, 0.0);
        std::string gram;
        for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
            gram.clear();
            for (std::size_t j = i; j < i + 3; ++j) unicode::append(gram, cps[j]);
            const auto h = hash(gram);
            acc[h % dim_] += (h >> 63) ? -1.0 : 1.0;
        }
        double sq = 0.0;
        for (double x : acc) sq += x * x;
        EmbeddingVector v(dim_, 0.0f);
        if (sq == 0.0) {
            v[0] = 1.0f;
        } else {
            const double inv = 1.0 / std::sqrt(sq);
            for (std::size_t k = 0; k < dim_; ++k) v[k] = static_cast<float>(acc[k] * inv);
        }
        out.push_back(std::move(v));
    }
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(const ProviderConfig& config)
    : endpoint_(http::parse_endpoint(config.endpoint)),
      dim_(config.dimension),
      timeout_ms_(config.timeout_ms),
      retries_(config.retries),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config.max_in_flight, 1, 1024))) {
    if (dim_ < 8) throw RuntimeError("embedding dimension must be at least 8");
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed(std::span<const std::string> texts,
                                                            EmbeddingRole role) const {
    if (texts.empty()) throw DataError("embed: empty batch");
    nlohmann::json body;
    body["role"] = std::string(to_string(role));
    auto& arr = body["texts"] = nlohmann::json::array();
    for (const auto& t : texts) arr.push_back(std::string(role_prefix(role)) + t);

    for (int attempt = 0;; ++attempt) {
        try {
            return request(body, texts.size());
        } catch (const ProviderError& e) {
            if (!e.retryable() || attempt >= retries_) throw;
        }
    }
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::request(const nlohmann::json& body,
                                                              std::size_t expected) const {
    in_flight_.acquire();
    nlohmann::json reply;
    try {
        reply = http::post_json(endpoint_, body, timeout_ms_);
    } catch (...) {
        in_flight_.release();
        throw;
    }
    in_flight_.release();

    try {
        const auto dim = reply.at("dim").get<std::size_t>();
        if (dim != dim_) {
            throw ProviderError("embedding dimension " + std::to_string(dim) + " does not match configured " +
                                    std::to_string(dim_),
                                false);
        }
        const auto& vecs = reply.at("vectors");
        if (vecs.size() != expected) {
            throw ProviderError("embedding reply has " + std::to_string(vecs.size()) + " vectors for " +
                                    std::to_string(expected) + " texts",
                                false);
        }
        std::vector<EmbeddingVector> out;
        out.reserve(expected);
        for (const auto& row : vecs) {
            auto v = row.get<EmbeddingVector>();
            if (v.size() != dim_) throw ProviderError("embedding row has wrong dimension", false);
            l2_normalize(v);
            out.push_back(std::move(v));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed embedding reply: ") + e.what(), false);
    }
}

std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const ProviderConfig& config) {
    if (config.kind == "hash-mock") return std::make_shared<HashMockProvider>(config.dimension, config.seed);
    if (config.kind == "remote") return std::make_shared<RemoteEmbeddingProvider>(config);
    throw RuntimeError("unknown embedding provider kind '" + config.kind + "'");
}

}  // namespace darja
