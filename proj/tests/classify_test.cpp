#include "darja/classify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "darja/corpus.hpp"
#include "darja/error.hpp"
#include "darja/rng.hpp"
#include "support/gradcheck.hpp"

using namespace darja;

namespace {

SparseVector dense_to_sparse(const std::vector<double>& v) {
    SparseVector x;
    x.dimension = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            x.indices.push_back(static_cast<std::uint32_t>(i));
            x.values.push_back(v[i]);
        }
    }
    return x;
}

LabeledVectors xor_data() {
    LabeledVectors d;
    d.rows = {dense_to_sparse({0, 0}), dense_to_sparse({1, 0}), dense_to_sparse({0, 1}), dense_to_sparse({1, 1})};
    d.labels = {0, 1, 1, 0};
    return d;
}

double train_accuracy(const Classifier& m, const LabeledVectors& d) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < d.size(); ++i) ok += m.predict(d.rows[i]).intent == d.labels[i];
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

LabelCodec codec_of(int k) {
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back("c" + std::to_string(i));
    return LabelCodec(names);
}

}  // namespace

TEST(Softmax, TwoClassHandComputed) {
    const std::vector<double> logits{1.0, 0.0};
    const auto p = softmax(logits);
    EXPECT_NEAR(p[0], 0.7311, 1e-4);
    EXPECT_NEAR(p[1], 0.2689, 1e-4);
}

TEST(Softmax, ShiftInvariantAndNormalized) {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> z(7);
        for (double& x : z) x = rng.normal() * 5.0;
        auto shifted = z;
        for (double& x : shifted) x += 123.25;
        const auto a = make_prediction(z);
        const auto b = make_prediction(shifted);
        EXPECT_EQ(a.intent, b.intent);
        for (std::size_t k = 0; k < z.size(); ++k) {
            EXPECT_NEAR(a.distribution[k], b.distribution[k], 1e-12);
            EXPECT_GT(a.distribution[k], 0.0);
            EXPECT_LT(a.distribution[k], 1.0);
        }
        EXPECT_NEAR(std::accumulate(a.distribution.begin(), a.distribution.end(), 0.0), 1.0, 1e-9);
        EXPECT_EQ(a.confidence, *std::max_element(a.distribution.begin(), a.distribution.end()));
    }
}

TEST(Predict, ZeroModelIsUniform) {
    const LinearModel m(4, 10, 0.0);
    const auto p = m.predict(dense_to_sparse(std::vector<double>(10, 0.5)));
    for (double x : p.distribution) EXPECT_DOUBLE_EQ(x, 0.25);
    EXPECT_DOUBLE_EQ(p.confidence, 0.25);
}

TEST(Predict, DimensionMismatch) {
    const LinearModel m(2, 3, 0.0);
    EXPECT_THROW(m.predict(dense_to_sparse({1, 2})), DataError);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
    EXPECT_LT(test_support::logreg_gradcheck(3), 1e-4);
    EXPECT_LT(test_support::logreg_gradcheck(17), 1e-4);
}

TEST(LogReg, SeparableTwoClass) {
    LabeledVectors d;
    Rng rng(9);
    for (int i = 0; i < 40; ++i) {
        const double a = rng.uniform() + 0.2;
        const double b = rng.uniform() - 0.5;
        const bool pos = i % 2 == 0;
        d.rows.push_back(dense_to_sparse({pos ? a : -a, b}));
        d.labels.push_back(pos ? 1 : 0);
    }
    LogRegOptions opt;
    opt.seed = 1;
    const auto m = train_logreg(d, {}, 2, opt);
    EXPECT_DOUBLE_EQ(train_accuracy(m, d), 1.0);
}

TEST(LogReg, HugeRidgeShrinksToUniform) {
    const auto d = test_support::random_toy(30, 8, 3, 2);
    LogRegOptions opt;
    opt.l2 = 1e6;
    opt.seed = 2;
    const auto m = train_logreg(d, {}, 3, opt);
    double max_w = 0.0;
    for (double w : m.weights()) max_w = std::max(max_w, std::abs(w));
    EXPECT_LT(max_w, 1e-2);
    for (const auto& x : d.rows) {
        for (double p : m.predict(x).distribution) EXPECT_NEAR(p, 1.0 / 3.0, 0.1);
    }
}

TEST(LogReg, FullBatchLossNonIncreasing) {
    const auto d = test_support::random_toy(10, 12, 3, 5);
    LogRegOptions opt;
    opt.learning_rate = 0.01;
    opt.batch_size = 10;
    opt.max_epochs = 60;
    opt.patience = 1000;
    TrainingHistory h;
    train_logreg(d, {}, 3, opt, &h);
    ASSERT_EQ(h.train_loss.size(), 60u);
    for (std::size_t e = 1; e < h.train_loss.size(); ++e) EXPECT_LE(h.train_loss[e], h.train_loss[e - 1]);
}

TEST(LogReg, DivergenceIsReported) {
    auto d = test_support::random_toy(10, 4, 2, 8);
    for (auto& x : d.rows) {
        for (double& v : x.values) v *= 1e200;
    }
    LogRegOptions opt;
    opt.learning_rate = 1e100;
    EXPECT_THROW(train_logreg(d, {}, 2, opt), RuntimeError);
}

TEST(LogReg, EarlyStoppingKeepsBestEpoch) {
    const auto train = test_support::random_toy(40, 10, 3, 6);
    const auto val = test_support::random_toy(12, 10, 3, 7);
    LogRegOptions opt;
    opt.patience = 3;
    opt.max_epochs = 300;
    TrainingHistory h;
    const auto m = train_logreg(train, val, 3, opt, &h);
    ASSERT_TRUE(h.early_stopped);
    EXPECT_EQ(h.val_loss.size(), h.best_epoch + 1 + opt.patience);
    const double best = *std::min_element(h.val_loss.begin(), h.val_loss.end());
    EXPECT_DOUBLE_EQ(h.val_loss[h.best_epoch], best);
}

TEST(LogReg, DeterministicAndPersistent) {
    const auto d = test_support::random_toy(50, 20, 4, 11);
    LogRegOptions opt;
    opt.seed = 77;
    const auto a = train_logreg(d, {}, 4, opt);
    const auto b = train_logreg(d, {}, 4, opt);
    EXPECT_EQ(a.serialize(), b.serialize());

    const auto loaded = LinearModel::deserialize(a.serialize());
    const auto probes = test_support::random_toy(1000, 20, 4, 12);
    for (const auto& x : probes.rows) {
        const auto p = a.predict(x);
        const auto q = loaded.predict(x);
        EXPECT_EQ(p.intent, q.intent);
        EXPECT_EQ(p.distribution, q.distribution);
    }
    EXPECT_THROW(LinearModel::deserialize("LRM1"), FormatError);
    EXPECT_THROW(LinearModel::deserialize("MLP1" + a.serialize().substr(4)), FormatError);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
    EXPECT_LT(test_support::mlp_gradcheck(4), 1e-3);
    EXPECT_LT(test_support::mlp_gradcheck(21), 1e-3);
}

TEST(Mlp, LearnsXorWhereLogRegCannot) {
    const auto d = xor_data();
    MlpOptions opt;
    opt.max_epochs = 1500;
    opt.patience = 1500;
    opt.seed = 3;
    const auto mlp = train_mlp(d, {}, 2, opt);
    EXPECT_DOUBLE_EQ(train_accuracy(mlp, d), 1.0);

    LogRegOptions lopt;
    lopt.max_epochs = 500;
    lopt.patience = 500;
    const auto lr = train_logreg(d, {}, 2, lopt);
    EXPECT_LE(train_accuracy(lr, d), 0.75);
}

TEST(Mlp, ZeroInputFollowsBiasPath) {
    const std::vector<std::size_t> hidden{6, 4};
    MlpModel m(5, hidden, 3, 0.3, 8);
    Rng rng(10);
    for (auto& l : m.layers()) {
        for (double& b : l.bias) b = rng.normal();
    }
    const auto& L = m.layers();
    auto relu_affine = [](const DenseLayer& layer, const std::vector<double>& a, bool relu) {
        std::vector<double> z(layer.bias);
        for (std::size_t i = 0; i < layer.in; ++i) {
            for (std::size_t o = 0; o < layer.out; ++o) z[o] += a[i] * layer.weights[i * layer.out + o];
        }
        if (relu) {
            for (double& v : z) v = std::max(0.0, v);
        }
        return z;
    };
    std::vector<double> a1(L[0].bias);
    for (double& v : a1) v = std::max(0.0, v);
    const auto a2 = relu_affine(L[1], a1, true);
    const auto expected = relu_affine(L[2], a2, false);
    SparseVector zero;
    zero.dimension = 5;
    const auto got = m.logits(zero);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got[k], expected[k], 1e-12);
}

TEST(Mlp, DeterministicAndPersistent) {
    const auto d = test_support::random_toy(40, 16, 3, 13);
    MlpOptions opt;
    opt.hidden = {16, 8};
    opt.max_epochs = 20;
    opt.seed = 5;
    const auto a = train_mlp(d, {}, 3, opt);
    const auto b = train_mlp(d, {}, 3, opt);
    EXPECT_EQ(a.serialize(), b.serialize());
    const auto loaded = MlpModel::deserialize(a.serialize());
    const auto probes = test_support::random_toy(1000, 16, 3, 14);
    for (const auto& x : probes.rows) EXPECT_EQ(a.predict(x).distribution, loaded.predict(x).distribution);
    EXPECT_THROW(MlpModel::deserialize(a.serialize().substr(0, 30)), FormatError);
}

TEST(Metrics, PerfectPredictions) {
    const std::vector<int> y{0, 1, 2, 2, 1, 0};
    const auto m = compute_metrics(y, y, codec_of(3));
    EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
    EXPECT_DOUBLE_EQ(m.weighted_f1, 1.0);
    EXPECT_DOUBLE_EQ(m.macro_f1, 1.0);
}

TEST(Metrics, ThreeClassConfusionOracle) {
    const std::vector<std::vector<std::size_t>> cm{{5, 0, 0}, {0, 3, 2}, {0, 1, 4}};
    const auto [truth, pred] = test_support::expand_confusion(cm);
    const auto oracle = test_support::brute_metrics(truth, pred, 3);
    const auto m = compute_metrics(truth, pred, codec_of(3));
    EXPECT_NEAR(m.accuracy, 0.8, 1e-12);
    EXPECT_NEAR(m.accuracy, oracle.accuracy, 1e-12);
    EXPECT_NEAR(m.weighted_f1, oracle.weighted_f1, 1e-12);
    EXPECT_NEAR(m.macro_f1, oracle.macro_f1, 1e-12);
    ASSERT_EQ(m.per_class.size(), 3u);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(m.per_class[c].f1, oracle.f1[c], 1e-12);
    // Hand values: F1 = 1, 2/3, 8/11.
    EXPECT_NEAR(m.macro_f1, (1.0 + 2.0 / 3.0 + 8.0 / 11.0) / 3.0, 1e-12);
}

TEST(Metrics, DegenerateAllClassZero) {
    const std::vector<int> truth{0, 0, 1, 1, 2, 2};
    const std::vector<int> pred(6, 0);
    const auto m = compute_metrics(truth, pred, codec_of(3));
    EXPECT_NEAR(m.macro_f1, 0.5 / 3.0, 1e-12);
}

TEST(Metrics, MacroBoundedByPerClass) {
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> truth, pred;
        for (int i = 0; i < 50; ++i) {
            truth.push_back(static_cast<int>(rng.below(5)));
            pred.push_back(rng.uniform() < 0.6 ? truth.back() : static_cast<int>(rng.below(5)));
        }
        const auto m = compute_metrics(truth, pred, codec_of(5));
        double lo = 1.0, hi = 0.0;
        for (const auto& c : m.per_class) {
            lo = std::min(lo, c.f1);
            hi = std::max(hi, c.f1);
            EXPECT_GE(c.precision, 0.0);
            EXPECT_LE(c.recall, 1.0);
        }
        EXPECT_LE(lo, m.macro_f1 + 1e-15);
        EXPECT_GE(hi, m.macro_f1 - 1e-15);
        EXPECT_GE(m.weighted_f1, 0.0);
        EXPECT_LE(m.weighted_f1, 1.0);
    }
}
