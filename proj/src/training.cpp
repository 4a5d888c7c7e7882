#include "darja/training.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/rng.hpp"

namespace darja {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> normalized_texts(const Dataset& ds) {
    std::vector<std::string> out;
    out.reserve(ds.size());
    for (const auto& ex : ds.examples) out.push_back(normalize(ex.utterance).text);
    return out;
}

// Prefix the stage to whatever went wrong, keeping the error category.
template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    } catch (const ProviderError&) {
        throw;
    } catch (const RuntimeError& e) {
        throw RuntimeError(std::string(name) + ": " + e.what());
    }
}

void render_metrics(std::ostringstream& out, const char* title, const Metrics& m, const TrainingHistory& h) {
    out << "== " << title << " ==\n";
    out << "best_epoch " << h.best_epoch << (h.early_stopped ? " (early stop)" : "") << " of " << h.train_loss.size()
        << "\n";
    out << format_report(m);
}

}  // namespace

SparseVector NluModel::featurize(std::string_view text, NormalizedUtterance* normalized) const {
    auto n = normalize(text);
    auto v = vocab.transform(n.text);
    if (normalized) *normalized = std::move(n);
    return v;
}

void NluModel::save(const std::string& dir) const {
    fs::create_directories(dir);
    vocab.save(dir + "/vocab.tfv");
    io::write_file_atomic(dir + "/labels.tsv", labels.to_tsv());
    logreg.save(dir + "/model.lrm");
    const auto mlp_path = dir + "/model.mlp";
    if (mlp) {
        mlp->save(mlp_path);
    } else {
        std::error_code ec;
        fs::remove(mlp_path, ec);
    }
}

NluModel NluModel::load(const std::string& dir) {
    NluModel m;
    m.vocab = TfidfVocabulary::load(dir + "/vocab.tfv");
    m.labels = LabelCodec::from_tsv(io::read_file(dir + "/labels.tsv"));
    m.logreg = LinearModel::load(dir + "/model.lrm");
    if (fs::exists(dir + "/model.mlp")) m.mlp = MlpModel::load(dir + "/model.mlp");
    if (m.logreg.input_dim() != m.vocab.size())
        throw FormatError(dir + ": model expects " + std::to_string(m.logreg.input_dim()) + " features, vocabulary has " +
                          std::to_string(m.vocab.size()));
    if (m.logreg.num_classes() != m.labels.size())
        throw FormatError(dir + ": model has " + std::to_string(m.logreg.num_classes()) + " classes, labels.tsv has " +
                          std::to_string(m.labels.size()));
    if (m.mlp && (m.mlp->input_dim() != m.vocab.size() || m.mlp->num_classes() != m.labels.size()))
        throw FormatError(dir + ": model.mlp shape does not match vocabulary and labels");
    return m;
}

LabeledVectors vectorize(const NluModel& model, const Dataset& dataset) {
    LabeledVectors out;
    out.rows.reserve(dataset.size());
    out.labels.reserve(dataset.size());
    for (const auto& ex : dataset.examples) {
        out.rows.push_back(model.featurize(ex.utterance.text));
        out.labels.push_back(model.labels.encode(ex.intent));
    }
    return out;
}

std::string TrainReport::render() const {
    std::ostringstream out;
    out << "examples " << stats.total << " intents " << stats.intents << " (min " << stats.min_per_intent << ", max "
        << stats.max_per_intent << ")\n";
    out << "split train " << train_size << " val " << val_size << " test " << test_size << "\n";
    out << "vocabulary " << vocabulary << "\n\n";
    render_metrics(out, "logistic regression", logreg, logreg_history);
    if (mlp) {
        out << "\n";
        render_metrics(out, "mlp", *mlp, *mlp_history);
    }
    return out.str();
}

TrainResult train_pipeline(const Dataset& dataset, const SynonymLexicon& lexicon, const TrainOptions& options) {
    TrainResult r;
    if (dataset.empty()) throw DataError("dataset: no examples");
    const auto balanced =
        stage("balance", [&] { return balance_dataset(dataset, options.min_per_intent, lexicon, options.seed); });
    r.split = stage("split", [&] { return stratified_split(balanced, options.ratios, options.seed); });
    r.report.stats = compute_stats(balanced);
    r.report.train_size = r.split.train.size();
    r.report.val_size = r.split.val.size();
    r.report.test_size = r.split.test.size();

    auto& m = r.model;
    stage("features", [&] {
        m.labels = fit_label_codec(balanced);
        const auto texts = normalized_texts(r.split.train);
        m.vocab = fit_tfidf(texts, options.ngrams, options.min_df);
        r.report.vocabulary = m.vocab.size();
    });
    const auto train = vectorize(m, r.split.train);
    const auto val = vectorize(m, r.split.val);
    const auto test = vectorize(m, r.split.test);

    stage("train logreg", [&] {
        auto opts = options.logreg;
        opts.seed = mix64(options.seed ^ 0x6c72);
        m.logreg = train_logreg(train, val, m.labels.size(), opts, &r.report.logreg_history);
    });
    r.report.logreg = stage("evaluate", [&] { return evaluate(m.logreg, test, m.labels); });

    if (options.with_mlp) {
        stage("train mlp", [&] {
            auto opts = options.mlp;
            opts.seed = mix64(options.seed ^ 0x6d6c70);
            r.report.mlp_history.emplace();
            m.mlp = train_mlp(train, val, m.labels.size(), opts, &*r.report.mlp_history);
        });
        r.report.mlp = stage("evaluate", [&] { return evaluate(*m.mlp, test, m.labels); });
    }
    return r;
}

}  // namespace darja
