#include "darja/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/unicode.hpp"

namespace darja {

double SparseVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

std::vector<std::string> char_ngrams(std::string_view text, NgramRange range) {
    const std::u32string cps = unicode::decode(text);
    std::vector<std::string> out;
    for (std::size_t n = range.min_n; n <= range.max_n; ++n) {
        if (cps.size() < n) continue;
        for (std::size_t i = 0; i + n <= cps.size(); ++i) {
            out.push_back(unicode::encode(std::u32string_view(cps).substr(i, n)));
        }
    }
    return out;
}

double TfidfVocabulary::smoothed_idf(std::uint64_t doc_count, std::uint64_t df) {
    return std::log((1.0 + static_cast<double>(doc_count)) / (1.0 + static_cast<double>(df))) + 1.0;
}

TfidfVocabulary TfidfVocabulary::fit(std::span<const std::string> texts, NgramRange range, std::size_t min_df) {
    if (texts.empty()) throw DataError("tf-idf: cannot fit on an empty corpus");
    if (range.min_n == 0 || range.min_n > range.max_n) throw DataError("tf-idf: invalid n-gram range");

    std::map<std::string, std::uint64_t> df;
    for (const auto& text : texts) {
        auto grams = char_ngrams(text, range);
        std::sort(grams.begin(), grams.end());
        grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
        for (auto& g : grams) ++df[std::move(g)];
    }

    TfidfVocabulary vocab;
    vocab.range_ = range;
    vocab.doc_count_ = texts.size();
    for (const auto& [gram, count] : df) {
        if (count < min_df) continue;
        vocab.ngrams_.push_back(gram);
        vocab.df_.push_back(count);
        vocab.idf_.push_back(smoothed_idf(vocab.doc_count_, count));
    }
    if (vocab.ngrams_.empty()) {
        throw DataError("tf-idf: empty vocabulary (texts shorter than " + std::to_string(range.min_n) +
                        " characters or min_df too high)");
    }
    vocab.index_columns();
    return vocab;
}

void TfidfVocabulary::index_columns() {
    columns_.clear();
    columns_.reserve(ngrams_.size());
    for (std::size_t i = 0; i < ngrams_.size(); ++i) columns_.emplace(ngrams_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> TfidfVocabulary::column_of(std::string_view ngram) const {
    auto it = columns_.find(std::string(ngram));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
}

SparseVector TfidfVocabulary::transform(std::string_view text) const {
    std::vector<std::uint32_t> hits;
    for (const auto& gram : char_ngrams(text, range_)) {
        auto it = columns_.find(gram);
        if (it != columns_.end()) hits.push_back(it->second);
    }
    std::sort(hits.begin(), hits.end());

    SparseVector v;
    v.dimension = ngrams_.size();
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        v.indices.push_back(hits[i]);
        v.values.push_back(static_cast<double>(j - i) * idf_[hits[i]]);
        i = j;
    }
    const double n = v.norm();
    if (n > 0.0) {
        for (double& x : v.values) x /= n;
    }
    return v;
}

namespace {
constexpr std::string_view kMagic = "TFV1";
}

std::string TfidfVocabulary::serialize() const {
    io::Writer w;
    w.bytes(kMagic);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(range_.min_n));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(range_.max_n));
    w.put<std::uint64_t>(ngrams_.size());
    w.put<std::uint64_t>(doc_count_);
    for (std::size_t i = 0; i < ngrams_.size(); ++i) {
        w.str(ngrams_[i]);
        w.put<std::uint64_t>(df_[i]);
        w.put<double>(idf_[i]);
    }
    return w.data();
}

TfidfVocabulary TfidfVocabulary::deserialize(std::string_view bytes) {
    io::Reader r(bytes, "tf-idf vocabulary");
    if (bytes.size() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) r.fail_at(0, "bad magic (expected TFV1)");
    TfidfVocabulary vocab;
    vocab.range_.min_n = r.get<std::uint32_t>();
    vocab.range_.max_n = r.get<std::uint32_t>();
    if (vocab.range_.min_n == 0 || vocab.range_.min_n > vocab.range_.max_n) r.fail("invalid n-gram range");
    const auto v = r.get<std::uint64_t>();
    vocab.doc_count_ = r.get<std::uint64_t>();
    if (v > bytes.size()) r.fail("implausible vocabulary size");
    for (std::uint64_t i = 0; i < v; ++i) {
        const std::size_t at = r.offset();
        vocab.ngrams_.push_back(r.str());
        const auto df = r.get<std::uint64_t>();
        const double stored = r.get<double>();
        const double idf = smoothed_idf(vocab.doc_count_, df);
        if (df == 0 || df > vocab.doc_count_) r.fail_at(at, "document frequency out of range");
        if (!(std::abs(idf - stored) <= 1e-12 * std::abs(idf))) r.fail_at(at, "stored idf does not match df");
        if (i > 0 && !(vocab.ngrams_[i - 1] < vocab.ngrams_[i])) r.fail_at(at, "n-grams not in sorted order");
        vocab.df_.push_back(df);
        vocab.idf_.push_back(idf);
    }
    r.expect_end();
    vocab.index_columns();
    return vocab;
}

void TfidfVocabulary::save(const std::string& path) const { io::write_file_atomic(path, serialize()); }

TfidfVocabulary TfidfVocabulary::load(const std::string& path) { return deserialize(io::read_file(path)); }

}  // namespace darja
