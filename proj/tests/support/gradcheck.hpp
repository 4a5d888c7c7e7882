#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "darja/classify.hpp"
#include "darja/rng.hpp"

namespace darja::test_support {

// Random sparse rows with a few non-zeros each.
inline LabeledVectors random_toy(std::size_t n, std::size_t dim, std::size_t classes, std::uint64_t seed) {
    Rng rng(seed);
    LabeledVectors data;
    for (std::size_t i = 0; i < n; ++i) {
        SparseVector x;
        x.dimension = dim;
        for (std::size_t j = 0; j < dim; ++j) {
            if (rng.uniform() < 0.6) {
                x.indices.push_back(static_cast<std::uint32_t>(j));
                x.values.push_back(rng.uniform() * 2.0 - 1.0);
            }
        }
        data.rows.push_back(x);
        data.labels.push_back(static_cast<int>(rng.below(classes)));
    }
    return data;
}

// Central differences over every parameter reachable through `params`.
// Relative error per component: |a - n| / max(|a|, |n|, floor).
inline double max_relative_error(const std::vector<double*>& params, const std::vector<double>& analytic,
                                 const std::function<double()>& objective, double eps = 1e-5,
                                 double floor = 1e-8) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& p = *params[i];
        const double saved = p;
        p = saved + eps;
        const double up = objective();
        p = saved - eps;
        const double down = objective();
        p = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

inline double logreg_gradcheck(std::uint64_t seed = 3) {
    const auto data = random_toy(5, 6, 3, seed);
    LinearModel model(3, 6, 0.1);
    Rng rng(seed + 1);
    for (double& w : model.weights()) w = rng.normal() * 0.5;
    for (double& b : model.bias()) b = rng.normal() * 0.5;
    const LinearModel grad = logreg_gradient(model, data);

    std::vector<double*> params;
    std::vector<double> analytic;
    for (std::size_t i = 0; i < model.weights().size(); ++i) {
        params.push_back(&model.weights()[i]);
        analytic.push_back(grad.weights()[i]);
    }
    for (std::size_t i = 0; i < model.bias().size(); ++i) {
        params.push_back(&model.bias()[i]);
        analytic.push_back(grad.bias()[i]);
    }
    return max_relative_error(params, analytic, [&] { return logreg_objective(model, data); });
}

inline double mlp_gradcheck(std::uint64_t seed = 4) {
    const auto data = random_toy(5, 6, 3, seed);
    const std::vector<std::size_t> hidden{7, 5};
    MlpModel model(6, hidden, 3, 0.0, seed);
    Rng rng(seed + 2);
    for (auto& l : model.layers()) {
        for (double& b : l.bias) b = rng.normal() * 0.3;
    }
    const MlpModel grad = mlp_gradient(model, data);

    std::vector<double*> params;
    std::vector<double> analytic;
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        auto& layer = model.layers()[l];
        const auto& g = grad.layers()[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            params.push_back(&layer.weights[i]);
            analytic.push_back(g.weights[i]);
        }
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
            params.push_back(&layer.bias[i]);
            analytic.push_back(g.bias[i]);
        }
    }
    return max_relative_error(params, analytic, [&] { return mlp_loss(model, data); });
}

// Metric oracle working from the flat label lists, not the matrix.
struct BruteMetrics {
    double accuracy = 0, weighted_f1 = 0, macro_f1 = 0;
    std::vector<double> f1;
};

inline BruteMetrics brute_metrics(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
    BruteMetrics out;
    int correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
    out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    int present = 0;
    for (int c = 0; c < k; ++c) {
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (pred[i] == c && truth[i] == c) ++tp;
            if (pred[i] == c && truth[i] != c) ++fp;
            if (pred[i] != c && truth[i] == c) ++fn;
        }
        if (tp + fp + fn == 0) {
            out.f1.push_back(0.0);
            continue;
        }
        ++present;
        const double p = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double r = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        out.f1.push_back(f);
        out.macro_f1 += f;
        out.weighted_f1 += f * (tp + fn) / static_cast<double>(truth.size());
    }
    out.macro_f1 /= present;
    return out;
}

inline std::pair<std::vector<int>, std::vector<int>> expand_confusion(const std::vector<std::vector<std::size_t>>& m) {
    std::vector<int> truth, pred;
    for (std::size_t t = 0; t < m.size(); ++t) {
        for (std::size_t p = 0; p < m.size(); ++p) {
            for (std::size_t n = 0; n < m[t][p]; ++n) {
                truth.push_back(static_cast<int>(t));
                pred.push_back(static_cast<int>(p));
            }
        }
    }
    return {truth, pred};
}

}  // namespace darja::test_support
