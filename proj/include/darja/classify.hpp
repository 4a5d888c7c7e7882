#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darja/features.hpp"

namespace darja {

class LabelCodec;

struct Prediction {
    int intent = 0;
    double confidence = 0.0;
    std::vector<double> distribution;
};

// Feature rows with integer labels in [0, K).
struct LabeledVectors {
    std::vector<SparseVector> rows;
    std::vector<int> labels;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }
};

// Max-logit-shifted softmax.
std::vector<double> softmax(std::span<const double> logits);
Prediction make_prediction(std::span<const double> logits);

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::vector<double> logits(const SparseVector& x) const = 0;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t num_classes() const = 0;

    // Throws DataError when x.dimension != input_dim().
    Prediction predict(const SparseVector& x) const;
};

struct TrainingHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::size_t best_epoch = 0;
    bool early_stopped = false;
};

// ---------------------------------------------------------------------------
// Multinomial logistic regression
// ---------------------------------------------------------------------------

class LinearModel : public Classifier {
public:
    LinearModel() = default;
    LinearModel(std::size_t classes, std::size_t dim, double l2);

    std::vector<double> logits(const SparseVector& x) const override;
    std::size_t input_dim() const override { return dim_; }
    std::size_t num_classes() const override { return classes_; }

    double l2() const { return l2_; }
    // Row-major K x V.
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }
    double& weight(std::size_t k, std::size_t j) { return weights_[k * dim_ + j]; }
    double weight(std::size_t k, std::size_t j) const { return weights_[k * dim_ + j]; }

    // "LRM1" | K u32 | V u64 | l2 f64 | W f64[K*V] | b f64[K]
    std::string serialize() const;
    static LinearModel deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static LinearModel load(const std::string& path);

private:
    std::size_t classes_ = 0;
    std::size_t dim_ = 0;
    double l2_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

struct LogRegOptions {
    double l2 = 1e-4;
    double learning_rate = 0.5;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    std::size_t patience = 5;
    std::uint64_t seed = 0;
};

// Mean cross-entropy plus (l2 / 2) * ||W||_F^2 (bias unpenalized).
double logreg_objective(const LinearModel& model, const LabeledVectors& data);
// Analytic gradient of logreg_objective, returned in a model of the same shape.
LinearModel logreg_gradient(const LinearModel& model, const LabeledVectors& data);

LinearModel train_logreg(const LabeledVectors& train, const LabeledVectors& val, std::size_t num_classes,
                         const LogRegOptions& options, TrainingHistory* history = nullptr);

// ---------------------------------------------------------------------------
// Multi-layer perceptron
// ---------------------------------------------------------------------------

// Weights stored input-major: weights[i * out + o].
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;
};

class MlpModel : public Classifier {
public:
    MlpModel() = default;
    MlpModel(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t classes, double dropout,
             std::uint64_t seed);

    std::vector<double> logits(const SparseVector& x) const override;
    std::size_t input_dim() const override { return layers_.empty() ? 0 : layers_.front().in; }
    std::size_t num_classes() const override { return layers_.empty() ? 0 : layers_.back().out; }

    double dropout() const { return dropout_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    // "MLP1" | L u32 | (in u64, out u64) x L | dropout f64 | per layer W, b (f64)
    std::string serialize() const;
    static MlpModel deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static MlpModel load(const std::string& path);

private:
    std::vector<DenseLayer> layers_;
    double dropout_ = 0.0;
};

struct MlpOptions {
    std::vector<std::size_t> hidden{256, 128};
    double dropout = 0.3;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 200;
    std::size_t patience = 5;
    std::uint64_t seed = 0;
};

// Mean cross-entropy with dropout disabled.
double mlp_loss(const MlpModel& model, const LabeledVectors& data);
// Analytic gradient of mlp_loss (dropout disabled), same shape as the model.
MlpModel mlp_gradient(const MlpModel& model, const LabeledVectors& data);

MlpModel train_mlp(const LabeledVectors& train, const LabeledVectors& val, std::size_t num_classes,
                   const MlpOptions& options, TrainingHistory* history = nullptr);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ClassMetrics {
    int intent = 0;
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    double macro_f1 = 0.0;
    std::size_t total = 0;
    // Only labels that occur in the truth or the predictions.
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<std::size_t>> confusion;
};

// confusion[t][p] counts examples of true class t predicted as p.
Metrics metrics_from_confusion(const std::vector<std::vector<std::size_t>>& confusion,
                               std::span<const std::string> names = {});
Metrics compute_metrics(std::span<const int> truth, std::span<const int> predicted, const LabelCodec& codec);
Metrics evaluate(const Classifier& model, const LabeledVectors& test, const LabelCodec& codec);

// Plain-text table: headline metrics then per-class precision/recall/F1/support.
std::string format_report(const Metrics& metrics);

}  // namespace darja
