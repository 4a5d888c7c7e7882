#include "darja/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "darja/error.hpp"
#include "darja/rng.hpp"
#include "darja/unicode.hpp"

namespace darja {

LabelCodec::LabelCodec(std::vector<std::string> names) : names_(std::move(names)) {
    std::sort(names_.begin(), names_.end());
    if (std::adjacent_find(names_.begin(), names_.end()) != names_.end()) {
        throw DataError("label codec: duplicate intent name");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw DataError("label codec: empty intent name");
        ids_.emplace(names_[i], static_cast<int>(i));
    }
}

int LabelCodec::encode(std::string_view name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw DataError("unknown intent '" + std::string(name) + "'");
    return it->second;
}

const std::string& LabelCodec::decode(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
        throw DataError("intent id out of range: " + std::to_string(id));
    }
    return names_[static_cast<std::size_t>(id)];
}

bool LabelCodec::contains(std::string_view name) const { return ids_.find(name) != ids_.end(); }

std::string LabelCodec::to_tsv() const {
    std::string out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        out += names_[i] + "\t" + std::to_string(i) + "\n";
    }
    return out;
}

LabelCodec LabelCodec::from_tsv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::pair<int, std::string>> rows;
    while (std::getline(in, line)) {
        if (unicode::trim(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError("label file: missing tab in '" + line + "'");
        int id = 0;
        try {
            id = std::stoi(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw DataError("label file: bad id in '" + line + "'");
        }
        rows.emplace_back(id, line.substr(0, tab));
    }
    LabelCodec codec;
    std::vector<std::string> names;
    for (const auto& r : rows) names.push_back(r.second);
    codec = LabelCodec(std::move(names));
    for (const auto& [id, name] : rows) {
        if (codec.encode(name) != id) {
            throw DataError("label file: id " + std::to_string(id) + " for '" + name +
                            "' does not follow lexicographic order");
        }
    }
    return codec;
}

void SynonymLexicon::add(const std::string& token, const std::string& replacement) {
    if (token.empty() || replacement.empty()) throw DataError("lexicon: empty token");
    if (token == replacement) throw DataError("lexicon: token '" + token + "' maps to itself");
    entries_[token].insert(replacement);
}

const std::set<std::string>* SynonymLexicon::find(const std::string& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? nullptr : &it->second;
}

SynonymLexicon SynonymLexicon::parse(std::istream& in, const std::string& source) {
    SynonymLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (unicode::trim(line).empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(source + ":" + std::to_string(line_no) + ": expected token<TAB>replacements");
        }
        const std::string token = unicode::trim(line.substr(0, tab));
        std::istringstream reps(line.substr(tab + 1));
        std::string rep;
        bool any = false;
        while (std::getline(reps, rep, ',')) {
            rep = unicode::trim(rep);
            if (rep.empty()) continue;
            if (rep == token) {
                throw DataError(source + ":" + std::to_string(line_no) + ": token maps to itself");
            }
            lex.add(token, rep);
            any = true;
        }
        if (!any) throw DataError(source + ":" + std::to_string(line_no) + ": no replacements");
    }
    return lex;
}

SynonymLexicon SynonymLexicon::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon " + path);
    return parse(in, path);
}

Dataset parse_dataset(std::istream& in, Script script, const std::string& source) {
    Dataset ds;
    ds.script = script;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (unicode::trim(line).empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError(where + ": missing intent column (expected intent<TAB>text)");
        std::string intent = unicode::trim(line.substr(0, tab));
        std::string text = line.substr(tab + 1);
        if (intent.empty()) throw DataError(where + ": empty intent name");
        if (normalize(text).text.empty()) throw DataError(where + ": text is empty after normalization");
        LabeledExample ex;
        ex.utterance.text = std::move(text);
        ex.utterance.source_tag = where;
        ex.intent = std::move(intent);
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Dataset load_dataset(const std::string& path, Script script) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset " + path);
    return parse_dataset(in, script, path);
}

Dataset load_dataset(const std::string& path, std::string_view script_tag) {
    const auto script = parse_script(script_tag);
    if (!script) throw DataError("unknown script tag '" + std::string(script_tag) + "' (expected arabic or latin)");
    return load_dataset(path, *script);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot write " + path);
    for (const auto& ex : dataset.examples) out << ex.intent << '\t' << ex.utterance.text << '\n';
}

LabelCodec fit_label_codec(const Dataset& dataset) {
    if (dataset.empty()) throw DataError("cannot fit label codec on an empty dataset");
    std::set<std::string> names;
    for (const auto& ex : dataset.examples) names.insert(ex.intent);
    return LabelCodec(std::vector<std::string>(names.begin(), names.end()));
}

std::array<std::size_t, 3> allocate_split(std::size_t n, const SplitRatios& ratios) {
    const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
    for (double x : r) {
        if (!(x >= 0.0)) throw DataError("split ratios must be non-negative");
    }
    if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw DataError("split ratios must sum to 1");
    if (n < 3) throw DataError("need at least 3 examples per intent to split; balance the dataset first");

    std::array<std::size_t, 3> alloc{};
    std::array<double, 3> remainder{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = static_cast<double>(n) * r[i];
        alloc[i] = static_cast<std::size_t>(std::floor(quota));
        remainder[i] = quota - static_cast<double>(alloc[i]);
        used += alloc[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; used < n; ++k, ++used) ++alloc[order[k % 3]];

    for (std::size_t i = 0; i < 3; ++i) {
        if (alloc[i] > 0) continue;
        std::size_t donor = 0;
        for (std::size_t j = 1; j < 3; ++j) {
            if (alloc[j] > alloc[donor]) donor = j;
        }
        --alloc[donor];
        alloc[i] = 1;
    }
    return alloc;
}

namespace {

std::map<std::string, std::vector<std::size_t>> group_by_intent(const Dataset& dataset) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        groups[dataset.examples[i].intent].push_back(i);
    }
    return groups;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

DatasetSplit stratified_split(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed) {
    DatasetSplit split;
    split.train.script = split.val.script = split.test.script = dataset.script;
    Rng rng(seed);
    for (auto& [intent, indices] : group_by_intent(dataset)) {
        if (indices.size() < 3) {
            throw DataError("intent '" + intent + "' has " + std::to_string(indices.size()) +
                            " examples; at least 3 are required, balance the dataset first");
        }
        const auto alloc = allocate_split(indices.size(), ratios);
        rng.shuffle(std::span<std::size_t>(indices));
        std::size_t k = 0;
        for (std::size_t i = 0; i < alloc[0]; ++i) split.train.examples.push_back(dataset.examples[indices[k++]]);
        for (std::size_t i = 0; i < alloc[1]; ++i) split.val.examples.push_back(dataset.examples[indices[k++]]);
        for (std::size_t i = 0; i < alloc[2]; ++i) split.test.examples.push_back(dataset.examples[indices[k++]]);
    }
    return split;
}

std::vector<LabeledExample> augment_synonyms(const LabeledExample& example, const SynonymLexicon& lexicon,
                                             std::size_t max_variants) {
    std::vector<LabeledExample> variants;
    if (lexicon.empty() || max_variants == 0) return variants;
    const auto tokens = unicode::split_whitespace(example.utterance.text);
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        const auto* replacements = lexicon.find(tokens[pos]);
        if (!replacements) continue;
        for (const auto& rep : *replacements) {
            auto swapped = tokens;
            swapped[pos] = rep;
            LabeledExample v;
            v.utterance.text = join(swapped);
            v.utterance.source_tag = "synonym";
            v.intent = example.intent;
            v.augmented = true;
            variants.push_back(std::move(v));
            if (variants.size() == max_variants) return variants;
        }
    }
    return variants;
}

Dataset balance_dataset(const Dataset& dataset, std::size_t min_per_intent, const SynonymLexicon& lexicon,
                        std::uint64_t seed, std::span<const std::string> expected_intents) {
    if (min_per_intent < 3) throw DataError("min_per_intent must be at least 3");
    const auto groups = group_by_intent(dataset);
    for (const auto& name : expected_intents) {
        if (!groups.count(name)) throw DataError("intent '" + name + "' has zero examples; cannot balance");
    }
    if (groups.empty()) throw DataError("cannot balance an empty dataset");

    Dataset out = dataset;
    Rng rng(seed);
    for (const auto& [intent, indices] : groups) {
        if (indices.size() >= min_per_intent) continue;
        std::size_t needed = min_per_intent - indices.size();

        std::set<std::string> seen;
        for (std::size_t i : indices) seen.insert(dataset.examples[i].utterance.text);
        for (std::size_t i : indices) {
            if (needed == 0) break;
            for (auto& v : augment_synonyms(dataset.examples[i], lexicon, needed + seen.size())) {
                if (needed == 0) break;
                if (!seen.insert(v.utterance.text).second) continue;
                out.examples.push_back(std::move(v));
                --needed;
            }
        }
        while (needed > 0) {
            LabeledExample dup = dataset.examples[indices[rng.below(indices.size())]];
            dup.augmented = true;
            dup.utterance.source_tag = "duplicate";
            out.examples.push_back(std::move(dup));
            --needed;
        }
    }
    return out;
}

DatasetStats compute_stats(const Dataset& dataset) {
    DatasetStats s;
    s.total = dataset.size();
    for (const auto& ex : dataset.examples) ++s.per_intent[ex.intent];
    s.intents = s.per_intent.size();
    if (s.intents == 0) return s;
    std::vector<std::size_t> counts;
    for (const auto& [_, c] : s.per_intent) counts.push_back(c);
    std::sort(counts.begin(), counts.end());
    s.min_per_intent = counts.front();
    s.max_per_intent = counts.back();
    s.mean_per_intent = static_cast<double>(s.total) / static_cast<double>(s.intents);
    const std::size_t m = counts.size() / 2;
    s.median_per_intent = counts.size() % 2 ? static_cast<double>(counts[m])
                                            : (static_cast<double>(counts[m - 1]) + static_cast<double>(counts[m])) / 2.0;
    return s;
}

}  // namespace darja
