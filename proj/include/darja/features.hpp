#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace darja {

// Sorted-index sparse row; values are finite and non-zero.
struct SparseVector {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
    std::size_t dimension = 0;

    std::size_t nnz() const { return indices.size(); }
    double norm() const;
};

struct NgramRange {
    std::size_t min_n = 3;
    std::size_t max_n = 4;
};

// Character n-gram TF-IDF space. Columns are n-grams in byte-lexicographic
// order; idf = ln((1 + N) / (1 + df)) + 1.
class TfidfVocabulary {
public:
    static TfidfVocabulary fit(std::span<const std::string> texts, NgramRange range = {}, std::size_t min_df = 1);

    // tf * idf per n-gram, L2-normalized; all-zero when nothing matches.
    SparseVector transform(std::string_view text) const;

    std::size_t size() const { return ngrams_.size(); }
    std::size_t doc_count() const { return doc_count_; }
    NgramRange range() const { return range_; }
    const std::string& ngram(std::size_t column) const { return ngrams_[column]; }
    std::uint64_t df(std::size_t column) const { return df_[column]; }
    double idf(std::size_t column) const { return idf_[column]; }
    std::optional<std::uint32_t> column_of(std::string_view ngram) const;

    // "TFV1" | n_min u32 | n_max u32 | V u64 | N u64 | V x (ngram, df u64, idf f64)
    std::string serialize() const;
    static TfidfVocabulary deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static TfidfVocabulary load(const std::string& path);

    static double smoothed_idf(std::uint64_t doc_count, std::uint64_t df);

private:
    void index_columns();

    NgramRange range_;
    std::uint64_t doc_count_ = 0;
    std::vector<std::string> ngrams_;
    std::vector<std::uint64_t> df_;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t> columns_;
};

// Every contiguous n-gram (UTF-8 encoded, codepoint based) for n in range,
// in text order, n ascending.
std::vector<std::string> char_ngrams(std::string_view text, NgramRange range);

inline TfidfVocabulary fit_tfidf(std::span<const std::string> texts, NgramRange range = {}, std::size_t min_df = 1) {
    return TfidfVocabulary::fit(texts, range, min_df);
}

inline SparseVector transform(const TfidfVocabulary& vocab, std::string_view text) { return vocab.transform(text); }

}  // namespace darja
