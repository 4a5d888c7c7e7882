#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "darja/normalize.hpp"

namespace darja {

struct LabeledExample {
    RawUtterance utterance;
    std::string intent;
    bool augmented = false;
};

struct Dataset {
    std::vector<LabeledExample> examples;
    Script script = Script::Latin;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

// Bijection intent name <-> id in [0, K), ids assigned in lexicographic order.
class LabelCodec {
public:
    LabelCodec() = default;
    explicit LabelCodec(std::vector<std::string> names);

    int encode(std::string_view name) const;
    const std::string& decode(int id) const;
    bool contains(std::string_view name) const;
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    // `intent<TAB>id` lines.
    std::string to_tsv() const;
    static LabelCodec from_tsv(std::string_view text);

    bool operator==(const LabelCodec& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::map<std::string, int, std::less<>> ids_;
};

// Surface token -> replacement tokens. A token never maps to itself.
class SynonymLexicon {
public:
    void add(const std::string& token, const std::string& replacement);
    const std::set<std::string>* find(const std::string& token) const;
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // `token<TAB>replacement1,replacement2,...`
    static SynonymLexicon parse(std::istream& in, const std::string& source);
    static SynonymLexicon load(const std::string& path);

private:
    std::map<std::string, std::set<std::string>> entries_;
};

// `intent<TAB>text` per line; blank lines skipped.
Dataset parse_dataset(std::istream& in, Script script, const std::string& source);
Dataset load_dataset(const std::string& path, Script script);
Dataset load_dataset(const std::string& path, std::string_view script_tag);
void save_dataset(const Dataset& dataset, const std::string& path);

LabelCodec fit_label_codec(const Dataset& dataset);

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

struct DatasetSplit {
    Dataset train;
    Dataset val;
    Dataset test;
};

// Largest-remainder allotment of n examples with at least one per split.
std::array<std::size_t, 3> allocate_split(std::size_t n, const SplitRatios& ratios);

DatasetSplit stratified_split(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed);

std::vector<LabeledExample> augment_synonyms(const LabeledExample& example, const SynonymLexicon& lexicon,
                                             std::size_t max_variants);

// Tops every intent up to `min_per_intent`: synonym variants first, then
// seeded duplicates. `expected_intents` lets callers assert that every known
// intent has at least one example.
Dataset balance_dataset(const Dataset& dataset, std::size_t min_per_intent, const SynonymLexicon& lexicon,
                        std::uint64_t seed, std::span<const std::string> expected_intents = {});

struct DatasetStats {
    std::size_t total = 0;
    std::size_t intents = 0;
    double mean_per_intent = 0.0;
    double median_per_intent = 0.0;
    std::size_t min_per_intent = 0;
    std::size_t max_per_intent = 0;
    std::map<std::string, std::size_t> per_intent;
};

DatasetStats compute_stats(const Dataset& dataset);

}  // namespace darja
