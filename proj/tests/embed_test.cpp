#include "darja/embed.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <future>
#include <mutex>

#include "darja/error.hpp"
#include "darja/rng.hpp"
#include "darja/unicode.hpp"
#include "support/mock_server.hpp"

using namespace darja;
using nlohmann::json;

namespace {

std::string random_words(Rng& rng, std::size_t min_len, std::size_t max_len) {
    static const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "k", "l", "m",
                                                      "n", "o", "r", "s", "t", "u", "w", "y", "z", "3", "7", "9",
                                                      "ب", "ت", "ح", "د", "ر", "س", "ع", "ف", "ل", "م", "ن", "و"};
    const auto len = min_len + rng.below(max_len - min_len + 1);
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        out += (i > 0 && rng.below(6) == 0) ? " " : alphabet[rng.below(alphabet.size())];
    }
    return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) { return dot(a, b); }

double norm(const EmbeddingVector& v) { return std::sqrt(dot(v, v)); }

// Unit vector along `axis`, scaled, for the fake remote encoder.
json fake_vectors(const json& texts, std::size_t dim) {
    json out = json::array();
    for (std::size_t i = 0; i < texts.size(); ++i) {
        std::vector<float> v(dim, 0.0f);
        v[i % dim] = 3.0f;
        out.push_back(v);
    }
    return out;
}

}  // namespace

TEST(HashMock, Deterministic) {
    const HashMockProvider p(384, 7);
    const auto a = p.embed_one("kifash nactivi roaming", EmbeddingRole::Query);
    const auto b = p.embed_one("kifash nactivi roaming", EmbeddingRole::Query);
    EXPECT_EQ(a, b);
    const HashMockProvider other_seed(384, 8);
    EXPECT_NE(a, other_seed.embed_one("kifash nactivi roaming", EmbeddingRole::Query));
}

TEST(HashMock, RolePrefixChangesVector) {
    const HashMockProvider p;
    const auto q = p.embed_one("tarif roaming", EmbeddingRole::Query);
    const auto d = p.embed_one("tarif roaming", EmbeddingRole::Passage);
    EXPECT_NE(q, d);
    EXPECT_LT(cosine(q, d), 1.0 - 1e-3);
}

// Rebuild the expected vector from the prefixed text's 3-grams.
TEST(HashMock, MatchesSignedBucketOracle) {
    const HashMockProvider p(64, 3);
    const std::string text = "Sama 1000 DA — شحال الثمن";
    std::string full = "passage: " + text;
    const auto cps = unicode::decode(full);
    std::vector<double> counts(64, 0.0);
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
        std::string g;
        for (std::size_t j = 0; j < 3; ++j) unicode::append(g, cps[i + j]);
        const auto h = p.hash(g);
        counts[h % 64] += (h >> 63) ? -1.0 : 1.0;
    }
    double n = 0;
    for (double c : counts) n += c * c;
    n = std::sqrt(n);
    const auto v = p.embed_one(text, EmbeddingRole::Passage);
    ASSERT_EQ(v.size(), 64u);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_FLOAT_EQ(v[k], static_cast<float>(counts[k] / n));
}

TEST(HashMock, UnitNormOverRandomTexts) {
    const HashMockProvider p;
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto v = p.embed_one(random_words(rng, 0, 120), i % 2 ? EmbeddingRole::Query : EmbeddingRole::Passage);
        EXPECT_NEAR(norm(v), 1.0, 1e-6);
    }
}

TEST(HashMock, SelfSimilarityAndConcentration) {
    const HashMockProvider p;
    Rng rng(12);
    double total = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = p.embed_one(random_words(rng, 30, 100), EmbeddingRole::Passage);
        const auto b = p.embed_one(random_words(rng, 30, 100), EmbeddingRole::Passage);
        EXPECT_NEAR(cosine(a, a), 1.0, 1e-6);
        total += std::abs(cosine(a, b));
    }
    EXPECT_LT(total / 1000.0, 0.15);
}

TEST(HashMock, BatchOrderMatchesSingles) {
    const HashMockProvider p;
    const std::vector<std::string> texts{"solde", "forfait internet", "code puk", "roaming"};
    const auto batch = p.embed(texts, EmbeddingRole::Query);
    ASSERT_EQ(batch.size(), texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(batch[i], p.embed_one(texts[i], EmbeddingRole::Query));
}

TEST(HashMock, Errors) {
    EXPECT_THROW(HashMockProvider(4), RuntimeError);
    const HashMockProvider p;
    EXPECT_THROW(p.embed({}, EmbeddingRole::Query), DataError);
}

TEST(Normalize, ZeroVectorBecomesFirstBasis) {
    EmbeddingVector v(8, 0.0f);
    l2_normalize(v);
    EXPECT_EQ(v[0], 1.0f);
    for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(v[i], 0.0f);
}

TEST(Remote, BatchedRequestPrefixedOnce) {
    test_support::MockServer srv;
    std::vector<json> bodies;
    std::mutex mu;
    srv.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        {
            std::lock_guard lock(mu);
            bodies.push_back(body);
        }
        res.set_content(json{{"dim", 16}, {"vectors", fake_vectors(body["texts"], 16)}}.dump(), "application/json");
    });
    srv.start();

    ProviderConfig cfg;
    cfg.kind = "remote";
    cfg.endpoint = srv.url("/embed");
    cfg.dimension = 16;
    const auto p = make_embedding_provider(cfg);
    const std::vector<std::string> texts{"a", "b", "c"};
    const auto out = p->embed(texts, EmbeddingRole::Passage);
    ASSERT_EQ(out.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_FLOAT_EQ(out[i][i], 1.0f);
        EXPECT_NEAR(norm(out[i]), 1.0, 1e-6);
    }
    ASSERT_EQ(bodies.size(), 1u);
    EXPECT_EQ(bodies[0]["role"], "passage");
    EXPECT_EQ(bodies[0]["texts"], (json{"passage: a", "passage: b", "passage: c"}));
}

TEST(Remote, RetryKeepsSinglePrefix) {
    test_support::MockServer srv;
    std::vector<std::string> bodies;
    srv.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        bodies.push_back(req.body);
        if (bodies.size() == 1) {
            res.status = 503;
            return;
        }
        const auto body = json::parse(req.body);
        res.set_content(json{{"dim", 8}, {"vectors", fake_vectors(body["texts"], 8)}}.dump(), "application/json");
    });
    srv.start();

    ProviderConfig cfg;
    cfg.endpoint = srv.url("/embed");
    cfg.dimension = 8;
    const RemoteEmbeddingProvider p(cfg);
    const auto v = p.embed_one("tarif", EmbeddingRole::Query);
    ASSERT_EQ(bodies.size(), 2u);
    EXPECT_EQ(bodies[0], bodies[1]);
    EXPECT_EQ(json::parse(bodies[1])["texts"][0], "query: tarif");
}

TEST(Remote, ErrorClassification) {
    test_support::MockServer srv;
    srv.server().Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    srv.server().Post("/wrongdim", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        res.set_content(json{{"dim", 4}, {"vectors", fake_vectors(body["texts"], 4)}}.dump(), "application/json");
    });
    srv.start();

    ProviderConfig cfg;
    cfg.dimension = 8;
    cfg.timeout_ms = 2000;
    auto expect_error = [&](const std::string& url, bool retryable) {
        cfg.endpoint = url;
        const RemoteEmbeddingProvider p(cfg);
        try {
            p.embed_one("x", EmbeddingRole::Query);
            ADD_FAILURE() << "expected ProviderError for " << url;
        } catch (const ProviderError& e) {
            EXPECT_EQ(e.retryable(), retryable) << e.what();
        }
    };
    expect_error(srv.url("/down"), true);
    expect_error(srv.url("/wrongdim"), false);

    // Nothing listens on port 1; connect is refused at once.
    expect_error("http://127.0.0.1:1/embed", true);
}

TEST(Remote, InFlightBound) {
    test_support::MockServer srv;
    std::mutex mu;
    int active = 0, peak = 0;
    srv.server().Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mu);
            peak = std::max(peak, ++active);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(40));
        {
            std::lock_guard lock(mu);
            --active;
        }
        const auto body = json::parse(req.body);
        res.set_content(json{{"dim", 8}, {"vectors", fake_vectors(body["texts"], 8)}}.dump(), "application/json");
    });
    srv.start();

    ProviderConfig cfg;
    cfg.endpoint = srv.url("/embed");
    cfg.dimension = 8;
    cfg.max_in_flight = 2;
    const RemoteEmbeddingProvider p(cfg);
    std::vector<std::future<EmbeddingVector>> jobs;
    for (int i = 0; i < 6; ++i) {
        jobs.push_back(std::async(std::launch::async, [&] { return p.embed_one("x", EmbeddingRole::Query); }));
    }
    for (auto& j : jobs) EXPECT_EQ(j.get().size(), 8u);
    EXPECT_LE(peak, 2);
    EXPECT_GE(peak, 1);
}

TEST(Factory, UnknownKind) {
    ProviderConfig cfg;
    cfg.kind = "bert";
    EXPECT_THROW(make_embedding_provider(cfg), RuntimeError);
    cfg.kind = "remote";
    cfg.endpoint = "localhost:9000";
    EXPECT_THROW(make_embedding_provider(cfg), RuntimeError);
}
