#include "darja/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/rng.hpp"

namespace darja {

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> p(logits.size());
    if (logits.empty()) return p;
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp(logits[k] - m);
        sum += p[k];
    }
    for (double& x : p) x /= sum;
    return p;
}

Prediction make_prediction(std::span<const double> logits) {
    Prediction pred;
    pred.distribution = softmax(logits);
    const auto it = std::max_element(pred.distribution.begin(), pred.distribution.end());
    pred.intent = static_cast<int>(it - pred.distribution.begin());
    pred.confidence = *it;
    return pred;
}

Prediction Classifier::predict(const SparseVector& x) const {
    if (x.dimension != input_dim()) {
        throw DataError("feature dimension " + std::to_string(x.dimension) + " does not match model input " +
                        std::to_string(input_dim()));
    }
    return make_prediction(logits(x));
}

namespace {

double cross_entropy(std::span<const double> logits, int label) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - m);
    return std::log(sum) + m - logits[static_cast<std::size_t>(label)];
}

void check_data(const LabeledVectors& data, std::size_t classes, std::size_t dim, const char* what) {
    if (data.rows.size() != data.labels.size()) throw DataError(std::string(what) + ": rows/labels size mismatch");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.rows[i].dimension != dim) throw DataError(std::string(what) + ": feature dimension mismatch");
        if (data.labels[i] < 0 || static_cast<std::size_t>(data.labels[i]) >= classes) {
            throw DataError(std::string(what) + ": label out of range");
        }
    }
}

double mean_cross_entropy(const Classifier& model, const LabeledVectors& data) {
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) total += cross_entropy(model.logits(data.rows[i]), data.labels[i]);
    return total / static_cast<double>(data.size());
}

[[noreturn]] void diverged(const char* what) {
    throw RuntimeError(std::string(what) + ": loss became non-finite; retry with a smaller learning rate");
}

std::vector<std::size_t> iota(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

LinearModel::LinearModel(std::size_t classes, std::size_t dim, double l2)
    : classes_(classes), dim_(dim), l2_(l2), weights_(classes * dim, 0.0), bias_(classes, 0.0) {
    if (classes == 0 || dim == 0) throw DataError("linear model needs at least one class and one feature");
}

std::vector<double> LinearModel::logits(const SparseVector& x) const {
    std::vector<double> z(bias_);
    for (std::size_t k = 0; k < classes_; ++k) {
        const double* row = weights_.data() + k * dim_;
        double s = 0.0;
        for (std::size_t n = 0; n < x.nnz(); ++n) s += row[x.indices[n]] * x.values[n];
        z[k] += s;
    }
    return z;
}

double logreg_objective(const LinearModel& model, const LabeledVectors& data) {
    double reg = 0.0;
    for (double w : model.weights()) reg += w * w;
    return mean_cross_entropy(model, data) + 0.5 * model.l2() * reg;
}

LinearModel logreg_gradient(const LinearModel& model, const LabeledVectors& data) {
    LinearModel grad(model.num_classes(), model.input_dim(), model.l2());
    const double inv_n = data.empty() ? 0.0 : 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& x = data.rows[i];
        auto p = softmax(model.logits(x));
        p[static_cast<std::size_t>(data.labels[i])] -= 1.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            grad.bias()[k] += p[k] * inv_n;
            for (std::size_t n = 0; n < x.nnz(); ++n) grad.weight(k, x.indices[n]) += p[k] * x.values[n] * inv_n;
        }
    }
    for (std::size_t j = 0; j < grad.weights().size(); ++j) grad.weights()[j] += model.l2() * model.weights()[j];
    return grad;
}

// Mini-batch proximal gradient descent: the cross-entropy step is explicit,
// the ridge term is applied as W <- W / (1 + lr * l2), which is stable for
// any l2.
LinearModel train_logreg(const LabeledVectors& train, const LabeledVectors& val, std::size_t num_classes,
                         const LogRegOptions& options, TrainingHistory* history) {
    if (train.empty()) throw DataError("logistic regression: empty training set");
    if (options.batch_size == 0 || options.max_epochs == 0) throw DataError("logistic regression: bad options");
    if (!(options.learning_rate > 0.0) || !(options.l2 >= 0.0)) throw DataError("logistic regression: bad options");
    const std::size_t dim = train.rows.front().dimension;
    check_data(train, num_classes, dim, "train");
    check_data(val, num_classes, dim, "validation");

    LinearModel model(num_classes, dim, options.l2);
    LinearModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    TrainingHistory local;
    TrainingHistory& hist = history ? *history : local;
    hist = {};

    Rng rng(options.seed);
    auto order = iota(train.size());
    const double shrink = 1.0 / (1.0 + options.learning_rate * options.l2);
    std::vector<std::vector<double>> residuals;

    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            const double step = options.learning_rate / static_cast<double>(end - start);
            residuals.clear();
            for (std::size_t b = start; b < end; ++b) {
                auto p = softmax(model.logits(train.rows[order[b]]));
                p[static_cast<std::size_t>(train.labels[order[b]])] -= 1.0;
                residuals.push_back(std::move(p));
            }
            for (std::size_t b = start; b < end; ++b) {
                const auto& x = train.rows[order[b]];
                const auto& r = residuals[b - start];
                for (std::size_t k = 0; k < num_classes; ++k) {
                    model.bias()[k] -= step * r[k];
                    for (std::size_t n = 0; n < x.nnz(); ++n) model.weight(k, x.indices[n]) -= step * r[k] * x.values[n];
                }
            }
            if (options.l2 > 0.0) {
                for (double& w : model.weights()) w *= shrink;
            }
        }

        const double train_loss = logreg_objective(model, train);
        const double val_loss = val.empty() ? train_loss : mean_cross_entropy(model, val);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) diverged("logistic regression");
        hist.train_loss.push_back(train_loss);
        hist.val_loss.push_back(val_loss);
        if (val_loss < best_loss) {
            best_loss = val_loss;
            best = model;
            hist.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= options.patience) {
            hist.early_stopped = true;
            break;
        }
    }
    return best;
}

namespace {
constexpr std::string_view kLinearMagic = "LRM1";
constexpr std::string_view kMlpMagic = "MLP1";
}  // namespace

std::string LinearModel::serialize() const {
    io::Writer w;
    w.bytes(kLinearMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(classes_));
    w.put<std::uint64_t>(dim_);
    w.put<double>(l2_);
    for (double x : weights_) w.put<double>(x);
    for (double x : bias_) w.put<double>(x);
    return w.data();
}

LinearModel LinearModel::deserialize(std::string_view bytes) {
    io::Reader r(bytes, "logistic regression model");
    if (bytes.size() < 4 || r.bytes(4) != kLinearMagic) r.fail_at(0, "bad magic (expected LRM1)");
    const auto k = r.get<std::uint32_t>();
    const auto v = r.get<std::uint64_t>();
    const double l2 = r.get<double>();
    if (k == 0 || v == 0 || (k * v + k) * 8 > bytes.size()) r.fail("implausible dimensions");
    LinearModel m(k, v, l2);
    for (double& x : m.weights_) x = r.get<double>();
    for (double& x : m.bias_) x = r.get<double>();
    r.expect_end();
    for (double x : m.weights_) {
        if (!std::isfinite(x)) throw FormatError("logistic regression model: non-finite weight");
    }
    return m;
}

void LinearModel::save(const std::string& path) const { io::write_file_atomic(path, serialize()); }
LinearModel LinearModel::load(const std::string& path) { return deserialize(io::read_file(path)); }

// ---------------------------------------------------------------------------
// MLP
// ---------------------------------------------------------------------------

MlpModel::MlpModel(std::size_t input_dim, std::span<const std::size_t> hidden, std::size_t classes, double dropout,
                   std::uint64_t seed)
    : dropout_(dropout) {
    if (input_dim == 0 || classes == 0) throw DataError("mlp needs at least one class and one feature");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw DataError("mlp dropout must be in [0, 1)");
    Rng rng(seed);
    std::size_t in = input_dim;
    std::vector<std::size_t> sizes(hidden.begin(), hidden.end());
    sizes.push_back(classes);
    for (std::size_t out : sizes) {
        if (out == 0) throw DataError("mlp layer width must be positive");
        DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (double& w : layer.weights) w = rng.normal() * scale;
        layers_.push_back(std::move(layer));
        in = out;
    }
}

namespace {

// Activations of one forward pass, kept for backprop. acts[l] is the input
// to layer l + 1 (post ReLU and dropout); pre[l] is layer l's affine output.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> keep;  // dropout multipliers, empty if off
};

void affine_sparse(const DenseLayer& layer, const SparseVector& x, std::vector<double>& z) {
    z.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t n = 0; n < x.nnz(); ++n) {
        const double* row = layer.weights.data() + static_cast<std::size_t>(x.indices[n]) * layer.out;
        const double v = x.values[n];
        for (std::size_t o = 0; o < layer.out; ++o) z[o] += v * row[o];
    }
}

void affine_dense(const DenseLayer& layer, const std::vector<double>& a, std::vector<double>& z) {
    z.assign(layer.bias.begin(), layer.bias.end());
    for (std::size_t i = 0; i < layer.in; ++i) {
        const double v = a[i];
        if (v == 0.0) continue;
        const double* row = layer.weights.data() + i * layer.out;
        for (std::size_t o = 0; o < layer.out; ++o) z[o] += v * row[o];
    }
}

void forward(const std::vector<DenseLayer>& layers, const SparseVector& x, double dropout, Rng* rng,
             ForwardTrace& t) {
    const std::size_t L = layers.size();
    t.pre.resize(L);
    t.acts.resize(L - 1);
    t.keep.resize(L - 1);
    for (std::size_t l = 0; l < L; ++l) {
        if (l == 0) {
            affine_sparse(layers[0], x, t.pre[0]);
        } else {
            affine_dense(layers[l], t.acts[l - 1], t.pre[l]);
        }
        if (l + 1 == L) break;
        auto& a = t.acts[l];
        a.resize(t.pre[l].size());
        for (std::size_t o = 0; o < a.size(); ++o) a[o] = std::max(0.0, t.pre[l][o]);
        auto& keep = t.keep[l];
        keep.clear();
        if (rng && dropout > 0.0) {
            keep.resize(a.size());
            const double scale = 1.0 / (1.0 - dropout);
            for (std::size_t o = 0; o < a.size(); ++o) {
                keep[o] = rng->uniform() < dropout ? 0.0 : scale;
                a[o] *= keep[o];
            }
        }
    }
}

// Accumulates weight * d(loss)/d(params) for one example into `grads`.
void backward(const std::vector<DenseLayer>& layers, const SparseVector& x, int label, double weight,
              const ForwardTrace& t, std::vector<DenseLayer>& grads) {
    const std::size_t L = layers.size();
    std::vector<double> delta = softmax(t.pre[L - 1]);
    delta[static_cast<std::size_t>(label)] -= 1.0;
    for (double& d : delta) d *= weight;

    for (std::size_t l = L; l-- > 0;) {
        auto& g = grads[l];
        const auto& layer = layers[l];
        for (std::size_t o = 0; o < layer.out; ++o) g.bias[o] += delta[o];
        if (l == 0) {
            for (std::size_t n = 0; n < x.nnz(); ++n) {
                double* row = g.weights.data() + static_cast<std::size_t>(x.indices[n]) * layer.out;
                const double v = x.values[n];
                for (std::size_t o = 0; o < layer.out; ++o) row[o] += v * delta[o];
            }
            break;
        }
        const auto& a = t.acts[l - 1];
        std::vector<double> prev(layer.in, 0.0);
        for (std::size_t i = 0; i < layer.in; ++i) {
            const double* wrow = layer.weights.data() + i * layer.out;
            double* grow = g.weights.data() + i * layer.out;
            double s = 0.0;
            for (std::size_t o = 0; o < layer.out; ++o) {
                grow[o] += a[i] * delta[o];
                s += wrow[o] * delta[o];
            }
            prev[i] = s;
        }
        const auto& keep = t.keep[l - 1];
        const auto& pre = t.pre[l - 1];
        for (std::size_t i = 0; i < layer.in; ++i) {
            double d = pre[i] > 0.0 ? prev[i] : 0.0;
            if (!keep.empty()) d *= keep[i];
            prev[i] = d;
        }
        delta = std::move(prev);
    }
}

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
    std::vector<DenseLayer> out;
    for (const auto& l : layers) {
        out.push_back({l.in, l.out, std::vector<double>(l.weights.size(), 0.0), std::vector<double>(l.out, 0.0)});
    }
    return out;
}

}  // namespace

std::vector<double> MlpModel::logits(const SparseVector& x) const {
    ForwardTrace t;
    forward(layers_, x, 0.0, nullptr, t);
    return t.pre.back();
}

double mlp_loss(const MlpModel& model, const LabeledVectors& data) { return mean_cross_entropy(model, data); }

MlpModel mlp_gradient(const MlpModel& model, const LabeledVectors& data) {
    MlpModel grad = model;
    grad.layers() = zeros_like(model.layers());
    const double w = data.empty() ? 0.0 : 1.0 / static_cast<double>(data.size());
    ForwardTrace t;
    for (std::size_t i = 0; i < data.size(); ++i) {
        forward(model.layers(), data.rows[i], 0.0, nullptr, t);
        backward(model.layers(), data.rows[i], data.labels[i], w, t, grad.layers());
    }
    return grad;
}

MlpModel train_mlp(const LabeledVectors& train, const LabeledVectors& val, std::size_t num_classes,
                   const MlpOptions& options, TrainingHistory* history) {
    if (train.empty()) throw DataError("mlp: empty training set");
    if (options.batch_size == 0 || options.max_epochs == 0 || !(options.learning_rate > 0.0)) {
        throw DataError("mlp: bad options");
    }
    const std::size_t dim = train.rows.front().dimension;
    check_data(train, num_classes, dim, "train");
    check_data(val, num_classes, dim, "validation");

    MlpModel model(dim, options.hidden, num_classes, options.dropout, options.seed);
    MlpModel best = model;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    TrainingHistory local;
    TrainingHistory& hist = history ? *history : local;
    hist = {};

    auto& layers = model.layers();
    auto grads = zeros_like(layers);
    auto velocity = zeros_like(layers);
    Rng rng(mix64(options.seed));
    auto order = iota(train.size());
    ForwardTrace trace;
    std::vector<std::uint32_t> touched;

    for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            const double w = 1.0 / static_cast<double>(end - start);
            touched.clear();
            for (std::size_t b = start; b < end; ++b) {
                const auto& x = train.rows[order[b]];
                forward(layers, x, options.dropout, &rng, trace);
                backward(layers, x, train.labels[order[b]], w, trace, grads);
                touched.insert(touched.end(), x.indices.begin(), x.indices.end());
            }
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto& p = layers[l];
                auto& g = grads[l];
                auto& v = velocity[l];
                for (std::size_t j = 0; j < p.weights.size(); ++j) {
                    v.weights[j] = options.momentum * v.weights[j] - options.learning_rate * g.weights[j];
                    p.weights[j] += v.weights[j];
                }
                for (std::size_t o = 0; o < p.out; ++o) {
                    v.bias[o] = options.momentum * v.bias[o] - options.learning_rate * g.bias[o];
                    p.bias[o] += v.bias[o];
                    g.bias[o] = 0.0;
                }
                if (l == 0) {
                    for (std::uint32_t row : touched) {
                        std::fill_n(g.weights.begin() + static_cast<std::ptrdiff_t>(row * p.out), p.out, 0.0);
                    }
                } else {
                    std::fill(g.weights.begin(), g.weights.end(), 0.0);
                }
            }
        }

        const double train_loss = mlp_loss(model, train);
        const double val_loss = val.empty() ? train_loss : mlp_loss(model, val);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) diverged("mlp");
        hist.train_loss.push_back(train_loss);
        hist.val_loss.push_back(val_loss);
        if (val_loss < best_loss) {
            best_loss = val_loss;
            best = model;
            hist.best_epoch = epoch;
            stale = 0;
        } else if (++stale >= options.patience) {
            hist.early_stopped = true;
            break;
        }
    }
    return best;
}

std::string MlpModel::serialize() const {
    io::Writer w;
    w.bytes(kMlpMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        w.put<std::uint64_t>(l.in);
        w.put<std::uint64_t>(l.out);
    }
    w.put<double>(dropout_);
    for (const auto& l : layers_) {
        for (double x : l.weights) w.put<double>(x);
        for (double x : l.bias) w.put<double>(x);
    }
    return w.data();
}

MlpModel MlpModel::deserialize(std::string_view bytes) {
    io::Reader r(bytes, "mlp model");
    if (bytes.size() < 4 || r.bytes(4) != kMlpMagic) r.fail_at(0, "bad magic (expected MLP1)");
    const auto count = r.get<std::uint32_t>();
    if (count == 0 || count > 64) r.fail("implausible layer count");
    MlpModel m;
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        DenseLayer l;
        l.in = r.get<std::uint64_t>();
        l.out = r.get<std::uint64_t>();
        if (l.in == 0 || l.out == 0) r.fail("zero layer width");
        if (i > 0 && l.in != m.layers_.back().out) r.fail("layer widths do not chain");
        total += l.in * l.out + l.out;
        m.layers_.push_back(std::move(l));
    }
    m.dropout_ = r.get<double>();
    if (total * 8 > bytes.size()) r.fail("implausible dimensions");
    for (auto& l : m.layers_) {
        l.weights.resize(l.in * l.out);
        l.bias.resize(l.out);
        for (double& x : l.weights) x = r.get<double>();
        for (double& x : l.bias) x = r.get<double>();
    }
    r.expect_end();
    return m;
}

void MlpModel::save(const std::string& path) const { io::write_file_atomic(path, serialize()); }
MlpModel MlpModel::load(const std::string& path) { return deserialize(io::read_file(path)); }

}  // namespace darja
