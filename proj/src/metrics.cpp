#include <iomanip>
#include <set>
#include <sstream>

#include "darja/classify.hpp"
#include "darja/corpus.hpp"
#include "darja/error.hpp"

namespace darja {

Metrics metrics_from_confusion(const std::vector<std::vector<std::size_t>>& confusion,
                               std::span<const std::string> names) {
    const std::size_t k = confusion.size();
    for (const auto& row : confusion) {
        if (row.size() != k) throw DataError("confusion matrix must be square");
    }
    Metrics m;
    m.confusion = confusion;
    std::vector<std::size_t> predicted(k, 0);
    std::vector<std::size_t> support(k, 0);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t p = 0; p < k; ++p) {
            support[t] += confusion[t][p];
            predicted[p] += confusion[t][p];
            m.total += confusion[t][p];
        }
        correct += confusion[t][t];
    }
    if (m.total == 0) return m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);

    double macro = 0.0;
    double weighted = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (support[c] == 0 && predicted[c] == 0) continue;
        ClassMetrics cm;
        cm.intent = static_cast<int>(c);
        cm.name = c < names.size() ? names[c] : std::to_string(c);
        cm.support = support[c];
        const double tp = static_cast<double>(confusion[c][c]);
        cm.precision = predicted[c] ? tp / static_cast<double>(predicted[c]) : 0.0;
        cm.recall = support[c] ? tp / static_cast<double>(support[c]) : 0.0;
        cm.f1 = (cm.precision + cm.recall) > 0.0 ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall) : 0.0;
        macro += cm.f1;
        weighted += cm.f1 * static_cast<double>(cm.support) / static_cast<double>(m.total);
        m.per_class.push_back(std::move(cm));
    }
    m.macro_f1 = macro / static_cast<double>(m.per_class.size());
    m.weighted_f1 = weighted;
    return m;
}

Metrics compute_metrics(std::span<const int> truth, std::span<const int> predicted, const LabelCodec& codec) {
    if (truth.size() != predicted.size()) throw DataError("truth and prediction lengths differ");
    const std::size_t k = codec.size();
    std::vector<std::vector<std::size_t>> confusion(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= k ||
            static_cast<std::size_t>(predicted[i]) >= k) {
            throw DataError("label out of range in metrics");
        }
        ++confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    }
    return metrics_from_confusion(confusion, codec.names());
}

Metrics evaluate(const Classifier& model, const LabeledVectors& test, const LabelCodec& codec) {
    std::vector<int> predicted;
    predicted.reserve(test.size());
    for (const auto& x : test.rows) predicted.push_back(model.predict(x).intent);
    return compute_metrics(test.labels, predicted, codec);
}

std::string format_report(const Metrics& m) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "accuracy\t" << m.accuracy << "\n";
    out << "weighted_f1\t" << m.weighted_f1 << "\n";
    out << "macro_f1\t" << m.macro_f1 << "\n";
    out << "examples\t" << m.total << "\n\n";
    out << "intent\tprecision\trecall\tf1\tsupport\n";
    for (const auto& c : m.per_class) {
        out << c.name << "\t" << c.precision << "\t" << c.recall << "\t" << c.f1 << "\t" << c.support << "\n";
    }
    return out.str();
}

}  // namespace darja
