#include "darja/vecindex.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/rng.hpp"

namespace darja {

namespace {

constexpr std::string_view kMagic = "HNS1";
constexpr std::size_t kMaxLevel = 32;

std::vector<float> normalized(std::span<const float> v) {
    std::vector<float> out(v.begin(), v.end());
    double sq = 0.0;
    for (float x : out) sq += static_cast<double>(x) * x;
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (float& x : out) x = static_cast<float>(x * inv);
    }
    return out;
}

// Closer first; equal scores fall back to slot order so runs are reproducible.
struct Closer {
    bool operator()(const auto& a, const auto& b) const {
        return a.score != b.score ? a.score > b.score : a.slot < b.slot;
    }
};
struct Farther {
    bool operator()(const auto& a, const auto& b) const { return Closer{}(b, a); }
};

}  // namespace

HnswIndex::HnswIndex(std::size_t dimension, HnswParams params) : dim_(dimension), params_(params) {
    if (dim_ == 0) throw DataError("index dimension must be positive");
    if (params_.M < 2) throw DataError("HNSW M must be at least 2");
    ml_ = 1.0 / std::log(static_cast<double>(params_.M));
}

std::size_t HnswIndex::draw_level(std::size_t ordinal) const {
    Rng rng(mix64(params_.seed) ^ mix64(ordinal));
    const double u = rng.open_uniform();
    return std::min(kMaxLevel, static_cast<std::size_t>(std::floor(-std::log(u) * ml_)));
}

double HnswIndex::score(std::span<const float> q, std::uint32_t slot) const {
    const auto& v = nodes_[slot].vec;
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += static_cast<double>(q[i]) * v[i];
    return s;
}

std::uint32_t HnswIndex::greedy(std::span<const float> q, std::uint32_t from, std::size_t layer) const {
    std::uint32_t cur = from;
    double best = score(q, cur);
    for (bool moved = true; moved;) {
        moved = false;
        for (auto n : nodes_[cur].links[layer]) {
            const double s = score(q, n);
            if (s > best || (s == best && n < cur)) {
                best = s;
                cur = n;
                moved = true;
            }
        }
    }
    return cur;
}

std::vector<HnswIndex::Cand> HnswIndex::search_layer(std::span<const float> q, std::uint32_t entry, std::size_t ef,
                                                     std::size_t layer) const {
    std::vector<char> seen(nodes_.size(), 0);
    std::priority_queue<Cand, std::vector<Cand>, Farther> frontier;  // best on top
    std::priority_queue<Cand, std::vector<Cand>, Closer> found;      // worst on top
    const Cand start{score(q, entry), entry};
    seen[entry] = 1;
    frontier.push(start);
    found.push(start);
    while (!frontier.empty()) {
        const Cand c = frontier.top();
        if (found.size() == ef && Closer{}(found.top(), c)) break;
        frontier.pop();
        for (auto n : nodes_[c.slot].links[layer]) {
            if (seen[n]) continue;
            seen[n] = 1;
            const Cand cand{score(q, n), n};
            if (found.size() < ef || Closer{}(cand, found.top())) {
                frontier.push(cand);
                found.push(cand);
                if (found.size() > ef) found.pop();
            }
        }
    }
    std::vector<Cand> out;
    out.reserve(found.size());
    while (!found.empty()) {
        out.push_back(found.top());
        found.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

void HnswIndex::link(std::uint32_t a, std::uint32_t b, std::size_t layer) {
    nodes_[a].links[layer].push_back(b);
    nodes_[b].links[layer].push_back(a);
}

// Keeps the cap closest neighbors; dropped edges are removed on both ends so
// adjacency stays symmetric. Neighbors that would be left with no edge at all
// are dropped last.
void HnswIndex::prune(std::uint32_t slot, std::size_t layer) {
    auto& links = nodes_[slot].links[layer];
    const std::size_t limit = cap(layer);
    if (links.size() <= limit) return;
    std::vector<Cand> ranked;
    ranked.reserve(links.size());
    for (auto n : links) ranked.push_back({score(nodes_[slot].vec, n), n});
    std::sort(ranked.begin(), ranked.end(), Farther{});  // farthest first

    std::size_t excess = links.size() - limit;
    std::vector<std::uint32_t> drop;
    for (int pass = 0; pass < 2 && excess > 0; ++pass) {
        for (const auto& c : ranked) {
            if (excess == 0) break;
            if (std::find(drop.begin(), drop.end(), c.slot) != drop.end()) continue;
            if (pass == 0 && nodes_[c.slot].links[layer].size() <= 1) continue;
            drop.push_back(c.slot);
            --excess;
        }
    }
    for (auto d : drop) {
        std::erase(links, d);
        std::erase(nodes_[d].links[layer], slot);
    }
}

void HnswIndex::insert(std::uint64_t id, std::span<const float> vector, std::string metadata) {
    if (vector.size() != dim_) {
        throw DataError("vector dimension " + std::to_string(vector.size()) + " does not match index dimension " +
                        std::to_string(dim_));
    }
    if (slots_.count(id)) throw DataError("duplicate index id " + std::to_string(id));

    const auto level = draw_level(nodes_.size());
    const auto slot = static_cast<std::uint32_t>(nodes_.size());
    Node node;
    node.id = id;
    node.vec = normalized(vector);
    node.links.resize(level + 1);
    node.metadata = std::move(metadata);
    nodes_.push_back(std::move(node));
    slots_.emplace(id, slot);

    if (slot == 0) {
        entry_ = 0;
        top_layer_ = level;
        return;
    }

    const std::span<const float> q = nodes_[slot].vec;
    std::uint32_t ep = entry_;
    for (std::size_t l = top_layer_; l > level; --l) ep = greedy(q, ep, l);
    for (std::size_t l = std::min(level, top_layer_) + 1; l-- > 0;) {
        auto found = search_layer(q, ep, params_.ef_construction, l);
        ep = found.front().slot;
        const std::size_t keep = std::min(cap(l), found.size());
        for (std::size_t i = 0; i < keep; ++i) link(slot, found[i].slot, l);
        for (std::size_t i = 0; i < keep; ++i) prune(found[i].slot, l);
    }
    if (level > top_layer_) {
        top_layer_ = level;
        entry_ = slot;
    }
}

std::vector<SearchHit> HnswIndex::finish(std::vector<Cand> cands, std::size_t k) const {
    std::vector<SearchHit> hits;
    hits.reserve(cands.size());
    for (const auto& c : cands) hits.push_back({nodes_[c.slot].id, c.score});
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

std::vector<SearchHit> HnswIndex::search(std::span<const float> query, std::size_t k, std::size_t ef_search) const {
    if (nodes_.empty() || k == 0) return {};
    if (query.size() != dim_) throw DataError("query dimension does not match index dimension");
    const auto q = normalized(query);
    const std::size_t ef = std::max(ef_search ? ef_search : params_.ef_search, k);
    std::uint32_t ep = entry_;
    for (std::size_t l = top_layer_; l > 0; --l) ep = greedy(q, ep, l);
    return finish(search_layer(q, ep, ef, 0), k);
}

std::vector<SearchHit> HnswIndex::exact_search(std::span<const float> query, std::size_t k) const {
    if (nodes_.empty() || k == 0) return {};
    if (query.size() != dim_) throw DataError("query dimension does not match index dimension");
    const auto q = normalized(query);
    std::vector<Cand> all;
    all.reserve(nodes_.size());
    for (std::uint32_t s = 0; s < nodes_.size(); ++s) all.push_back({score(q, s), s});
    return finish(std::move(all), k);
}

std::uint32_t HnswIndex::slot_of(std::uint64_t id) const {
    const auto it = slots_.find(id);
    if (it == slots_.end()) throw DataError("unknown index id " + std::to_string(id));
    return it->second;
}

const std::string& HnswIndex::metadata(std::uint64_t id) const { return nodes_[slot_of(id)].metadata; }
std::span<const float> HnswIndex::vector(std::uint64_t id) const { return nodes_[slot_of(id)].vec; }
std::size_t HnswIndex::level(std::uint64_t id) const { return nodes_[slot_of(id)].links.size() - 1; }

std::vector<std::uint64_t> HnswIndex::neighbors(std::uint64_t id, std::size_t layer) const {
    const auto& node = nodes_[slot_of(id)];
    std::vector<std::uint64_t> out;
    if (layer >= node.links.size()) return out;
    for (auto s : node.links[layer]) out.push_back(nodes_[s].id);
    return out;
}

std::uint64_t HnswIndex::entry_point() const {
    if (nodes_.empty()) throw DataError("empty index has no entry point");
    return nodes_[entry_].id;
}

std::vector<std::uint64_t> HnswIndex::ids() const {
    std::vector<std::uint64_t> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.id);
    return out;
}

std::string HnswIndex::serialize() const {
    io::Writer w;
    w.bytes(kMagic);
    w.put<std::uint8_t>(kFormatVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(dim_));
    w.put<std::uint64_t>(nodes_.size());
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params_.M));
    w.put<double>(ml_);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params_.ef_construction));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(params_.ef_search));
    w.put<std::uint64_t>(params_.seed);
    w.put<std::uint64_t>(nodes_.empty() ? 0 : nodes_[entry_].id);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(top_layer_));
    for (const auto& n : nodes_) {
        w.put<std::uint64_t>(n.id);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(n.links.size() - 1));
        for (float x : n.vec) w.put<float>(x);
        for (const auto& layer : n.links) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.size()));
            for (auto s : layer) w.put<std::uint64_t>(nodes_[s].id);
        }
        w.str(n.metadata);
    }
    return w.data();
}

HnswIndex HnswIndex::deserialize(std::string_view bytes) {
    io::Reader r(bytes, "HNSW index");
    if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) r.fail("corrupt header: bad magic");
    r.bytes(kMagic.size());
    const auto version_at = r.offset();
    const auto version = r.get<std::uint8_t>();
    if (version != kFormatVersion) {
        r.fail_at(version_at, "unsupported version " + std::to_string(version));
    }
    const auto dim = r.get<std::uint32_t>();
    const auto count = r.get<std::uint64_t>();
    HnswParams p;
    const auto m_at = r.offset();
    p.M = r.get<std::uint32_t>();
    const auto ml = r.get<double>();
    p.ef_construction = r.get<std::uint32_t>();
    p.ef_search = r.get<std::uint32_t>();
    p.seed = r.get<std::uint64_t>();
    const auto entry_id = r.get<std::uint64_t>();
    const auto top = r.get<std::uint32_t>();
    if (dim == 0 || p.M < 2) r.fail_at(m_at, "invalid dimension or M");

    HnswIndex index(dim, p);
    if (index.ml_ != ml) r.fail_at(m_at, "level multiplier does not match M");

    std::vector<std::vector<std::vector<std::uint64_t>>> raw_links;
    std::vector<std::size_t> link_offsets;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto at = r.offset();
        Node node;
        node.id = r.get<std::uint64_t>();
        const auto level = r.get<std::uint32_t>();
        if (level > kMaxLevel) r.fail_at(at, "node level out of range");
        node.vec.resize(dim);
        for (auto& x : node.vec) x = r.get<float>();
        link_offsets.push_back(r.offset());
        std::vector<std::vector<std::uint64_t>> layers(level + 1);
        for (auto& layer : layers) {
            const auto n = r.get<std::uint32_t>();
            if (n > index.cap(&layer == &layers.front() ? 0 : 1)) r.fail("neighbor list exceeds degree cap");
            layer.resize(n);
            for (auto& id : layer) id = r.get<std::uint64_t>();
        }
        node.links.resize(level + 1);
        node.metadata = r.str();
        if (!index.slots_.emplace(node.id, static_cast<std::uint32_t>(index.nodes_.size())).second) {
            r.fail_at(at, "duplicate node id");
        }
        index.nodes_.push_back(std::move(node));
        raw_links.push_back(std::move(layers));
    }
    r.expect_end();

    for (std::size_t s = 0; s < index.nodes_.size(); ++s) {
        for (std::size_t l = 0; l < raw_links[s].size(); ++l) {
            for (auto id : raw_links[s][l]) {
                const auto it = index.slots_.find(id);
                if (it == index.slots_.end() || index.nodes_[it->second].links.size() <= l) {
                    r.fail_at(link_offsets[s], "dangling neighbor id " + std::to_string(id));
                }
                index.nodes_[s].links[l].push_back(it->second);
            }
        }
    }
    if (count > 0) {
        const auto it = index.slots_.find(entry_id);
        if (it == index.slots_.end() || index.nodes_[it->second].links.size() != top + 1ull) {
            r.fail_at(kMagic.size() + 1, "entry point does not match nodes");
        }
        index.entry_ = it->second;
        index.top_layer_ = top;
    }
    return index;
}

void HnswIndex::save(const std::string& path) const { io::write_file_atomic(path, serialize()); }

HnswIndex HnswIndex::load(const std::string& path) {
    const auto bytes = io::read_file(path);
    try {
        return deserialize(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace darja
