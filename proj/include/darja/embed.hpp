#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darja/http_json.hpp"

namespace darja {

enum class EmbeddingRole { Query, Passage };

// "query: " / "passage: "
std::string_view role_prefix(EmbeddingRole role);
// "query" / "passage", as sent on the wire.
std::string_view to_string(EmbeddingRole role);

using EmbeddingVector = std::vector<float>;

void l2_normalize(EmbeddingVector& v);
double dot(std::span<const float> a, std::span<const float> b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    // Output i belongs to texts[i]; each vector has unit norm.
    // Throws DataError on an empty batch.
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts, EmbeddingRole role) const = 0;

    EmbeddingVector embed_one(const std::string& text, EmbeddingRole role) const;
};

struct ProviderConfig {
    std::string kind = "hash-mock";  // or "remote"
    std::string endpoint;
    std::size_t dimension = 384;
    int timeout_ms = 10000;
    std::uint64_t seed = 0;
    std::size_t max_in_flight = 4;
    int retries = 1;
};

// Signed hashed character 3-grams of the prefixed text.
class HashMockProvider : public EmbeddingProvider {
public:
    explicit HashMockProvider(std::size_t dimension = 384, std::uint64_t seed = 0);

    std::size_t dimension() const override { return dim_; }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts, EmbeddingRole role) const override;

    // Seeded 64-bit hash of one n-gram's UTF-8 bytes.
    std::uint64_t hash(std::string_view gram) const;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

class RemoteEmbeddingProvider : public EmbeddingProvider {
public:
    explicit RemoteEmbeddingProvider(const ProviderConfig& config);

    std::size_t dimension() const override { return dim_; }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts, EmbeddingRole role) const override;

private:
    std::vector<EmbeddingVector> request(const nlohmann::json& body, std::size_t expected) const;

    http::Endpoint endpoint_;
    std::size_t dim_;
    int timeout_ms_;
    int retries_;
    mutable std::counting_semaphore<1024> in_flight_;
};

// Wraps another provider and counts calls; used to prove a path never embeds.
class CountingEmbeddingProvider : public EmbeddingProvider {
public:
    explicit CountingEmbeddingProvider(std::shared_ptr<const EmbeddingProvider> inner) : inner_(std::move(inner)) {}

    std::size_t dimension() const override { return inner_->dimension(); }
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts, EmbeddingRole role) const override {
        calls_.fetch_add(1);
        return inner_->embed(texts, role);
    }
    std::size_t calls() const { return calls_.load(); }

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    mutable std::atomic<std::size_t> calls_{0};
};

// Throws RuntimeError for an unknown kind or D < 8.
std::shared_ptr<const EmbeddingProvider> make_embedding_provider(const ProviderConfig& config);

}  // namespace darja
