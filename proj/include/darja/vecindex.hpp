#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace darja {

struct SearchHit {
    std::uint64_t id = 0;
    double score = 0.0;  // cosine

    bool operator==(const SearchHit&) const = default;
};

struct HnswParams {
    std::size_t M = 16;  // layer 0 allows 2M
    std::size_t ef_construction = 200;
    std::size_t ef_search = 64;
    std::uint64_t seed = 0;
};

// Hierarchical navigable small-world graph with cosine scoring. Vectors are
// L2-normalized on insert so cosine is a dot product. Not internally
// synchronized: share a finished index read-only, or guard writes.
class HnswIndex {
public:
    static constexpr std::uint8_t kFormatVersion = 1;

    explicit HnswIndex(std::size_t dimension, HnswParams params = {});

    // Throws DataError on a duplicate id or a dimension mismatch.
    void insert(std::uint64_t id, std::span<const float> vector, std::string metadata = {});

    // ef = max(ef_search, k); ef_search 0 means the configured default.
    std::vector<SearchHit> search(std::span<const float> query, std::size_t k, std::size_t ef_search = 0) const;
    std::vector<SearchHit> exact_search(std::span<const float> query, std::size_t k) const;

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    std::size_t dimension() const { return dim_; }
    const HnswParams& params() const { return params_; }
    double level_multiplier() const { return ml_; }

    bool contains(std::uint64_t id) const { return slots_.count(id) != 0; }
    const std::string& metadata(std::uint64_t id) const;
    std::span<const float> vector(std::uint64_t id) const;
    std::size_t level(std::uint64_t id) const;
    std::vector<std::uint64_t> neighbors(std::uint64_t id, std::size_t layer) const;
    std::uint64_t entry_point() const;
    std::size_t top_layer() const { return top_layer_; }
    // Ids in insertion order.
    std::vector<std::uint64_t> ids() const;

    // "HNS1" | version u8 | D u32 | count u64 | M u32 | mL f64 | ef_construction u32 | ef_search u32 |
    // seed u64 | entry id u64 | top layer u32 | per node: id u64, level u32, D x f32,
    // (level+1) x (n u32, n x neighbor id u64), metadata (u32 length + bytes)
    std::string serialize() const;
    static HnswIndex deserialize(std::string_view bytes);
    void save(const std::string& path) const;
    static HnswIndex load(const std::string& path);

private:
    struct Node {
        std::uint64_t id = 0;
        std::vector<float> vec;
        std::vector<std::vector<std::uint32_t>> links;  // per layer, internal slots
        std::string metadata;
    };
    struct Cand {
        double score;
        std::uint32_t slot;
    };

    std::size_t draw_level(std::size_t ordinal) const;
    std::size_t cap(std::size_t layer) const { return layer == 0 ? 2 * params_.M : params_.M; }
    double score(std::span<const float> q, std::uint32_t slot) const;
    std::uint32_t greedy(std::span<const float> q, std::uint32_t from, std::size_t layer) const;
    std::vector<Cand> search_layer(std::span<const float> q, std::uint32_t entry, std::size_t ef,
                                   std::size_t layer) const;
    void link(std::uint32_t a, std::uint32_t b, std::size_t layer);
    void prune(std::uint32_t slot, std::size_t layer);
    std::uint32_t slot_of(std::uint64_t id) const;
    std::vector<SearchHit> finish(std::vector<Cand> cands, std::size_t k) const;

    std::size_t dim_;
    HnswParams params_;
    double ml_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> slots_;
    std::uint32_t entry_ = 0;
    std::size_t top_layer_ = 0;
};

}  // namespace darja
