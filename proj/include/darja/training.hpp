#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "darja/classify.hpp"
#include "darja/corpus.hpp"
#include "darja/features.hpp"
#include "darja/normalize.hpp"

namespace darja {

struct TrainOptions {
    std::size_t min_per_intent = 13;
    std::uint64_t seed = 42;
    SplitRatios ratios;
    NgramRange ngrams;
    std::size_t min_df = 1;
    LogRegOptions logreg;
    bool with_mlp = false;
    MlpOptions mlp;
};

// Everything the online path needs to turn raw text into a prediction.
struct NluModel {
    TfidfVocabulary vocab;
    LabelCodec labels;
    LinearModel logreg;
    std::optional<MlpModel> mlp;

    // normalize → TF-IDF. `normalized` receives the normalizer output when given.
    SparseVector featurize(std::string_view text, NormalizedUtterance* normalized = nullptr) const;
    // Logistic regression is the serving head; the MLP is evaluated offline only.
    Prediction predict(const SparseVector& features) const { return logreg.predict(features); }
    Prediction predict(std::string_view text) const { return predict(featurize(text)); }

    // vocab.tfv, labels.tsv, model.lrm and optionally model.mlp under dir.
    void save(const std::string& dir) const;
    static NluModel load(const std::string& dir);
};

struct TrainReport {
    DatasetStats stats;  // after balancing
    std::size_t train_size = 0, val_size = 0, test_size = 0;
    std::size_t vocabulary = 0;
    TrainingHistory logreg_history;
    Metrics logreg;
    std::optional<TrainingHistory> mlp_history;
    std::optional<Metrics> mlp;

    // Deterministic text: no timings, so identical seeds give identical bytes.
    std::string render() const;
};

struct TrainResult {
    NluModel model;
    TrainReport report;
    DatasetSplit split;
};

LabeledVectors vectorize(const NluModel& model, const Dataset& dataset);

// balance → split → fit TF-IDF on train → LR (and MLP) → evaluate on test.
// Failures are rethrown with the stage name prefixed.
TrainResult train_pipeline(const Dataset& dataset, const SynonymLexicon& lexicon, const TrainOptions& options);

}  // namespace darja
