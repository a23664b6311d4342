#include "densewatch/snapshot.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "densewatch/hashing.hpp"

namespace densewatch {

namespace {

constexpr char kMagic[5] = {'D', 'W', 'S', 'N', '1'};

void write_u64_le(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

} // namespace

std::uint64_t canonical_edge_key(NodeId u, NodeId v) noexcept {
    const NodeId lo = u < v ? u : v;
    const NodeId hi = u < v ? v : u;
    return mix64(mix64(lo) + 0x9e3779b97f4a7c15ULL * hi);
}

SnapshotBuilder::SnapshotBuilder(std::uint64_t tick, const SnapshotConfig& config)
    : tick_(tick),
      config_(config),
      edge_cms_(config.cms_width, config.cms_depth, mix64(config.seed ^ 0xe5f1a2b3c4d50607ULL)),
      degree_cms_(config.cms_width, config.cms_depth, mix64(config.seed ^ 0x1b2c3d4e5f607182ULL)),
      node_sketch_(config.fi_capacity) {
    pairs_.reserve(config.resolved_pair_budget());
}

void SnapshotBuilder::ingest(const EdgeEvent& event) {
    if (sealed_) throw StateError("ingest on a sealed builder");
    if (event.tick != tick_) throw ContractError("event tick does not match builder tick");

    const std::uint64_t key = canonical_edge_key(event.src, event.dst);
    edge_cms_.update(key, 1);
    ++edge_mass_;
    degree_cms_.update(event.src, 1);
    degree_cms_.update(event.dst, 1); // self-loop: same slot twice, degree +2
    node_sketch_.update(event.src, 1);
    node_sketch_.update(event.dst, 1);

    if (node_sketch_.contains(event.src) && node_sketch_.contains(event.dst) &&
        !pairs_.contains(key)) {
        if (pairs_.size() < config_.resolved_pair_budget()) {
            pairs_.emplace(key, std::make_pair(event.src, event.dst));
            ++distinct_edges_;
        } else {
            ++dropped_pairs_;
        }
    }
}

TickSnapshot SnapshotBuilder::seal() {
    if (sealed_) throw StateError("builder already sealed");
    sealed_ = true;
    return TickSnapshot(std::move(*this));
}

TickSnapshot SnapshotBuilder::seal_copy() const {
    if (sealed_) throw StateError("builder already sealed");
    return TickSnapshot(tick_, config_, edge_cms_, degree_cms_, node_sketch_, pairs_,
                        edge_mass_, distinct_edges_, dropped_pairs_);
}

void SnapshotBuilder::advance_tick(std::uint64_t new_tick) {
    if (sealed_) throw StateError("builder already sealed");
    if (new_tick < tick_) throw ContractError("ticks must not move backwards");
    tick_ = new_tick;
}

TickSnapshot::TickSnapshot(SnapshotBuilder&& b)
    : TickSnapshot(b.tick_, b.config_, std::move(b.edge_cms_), std::move(b.degree_cms_),
                   std::move(b.node_sketch_), std::move(b.pairs_), b.edge_mass_,
                   b.distinct_edges_, b.dropped_pairs_) {}

TickSnapshot::TickSnapshot(std::uint64_t tick, SnapshotConfig cfg, CountMinSketch edge,
                           CountMinSketch degree, FrequentItemsSketch nodes,
                           std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>> pairs,
                           std::uint64_t edge_mass, std::uint64_t distinct, std::uint64_t dropped)
    : tick_(tick),
      config_(cfg),
      edge_cms_(std::move(edge)),
      degree_cms_(std::move(degree)),
      node_sketch_(std::move(nodes)),
      pairs_(std::move(pairs)),
      edge_mass_(edge_mass),
      distinct_edges_(distinct),
      dropped_pairs_(dropped) {
    // drop pairs whose endpoints were evicted from the node sketch mid-tick
    for (auto it = pairs_.begin(); it != pairs_.end();) {
        const auto& [u, v] = it->second;
        if (!node_sketch_.contains(u) || !node_sketch_.contains(v)) {
            it = pairs_.erase(it);
        } else {
            ++it;
        }
    }
    build_adjacency();
}

void TickSnapshot::build_adjacency() {
    pair_estimates_.reserve(pairs_.size());
    for (const auto& [key, uv] : pairs_) {
        pair_estimates_.emplace(key, edge_cms_.query(key));
        if (uv.first != uv.second) {
            adjacency_[uv.first].push_back(uv.second);
            adjacency_[uv.second].push_back(uv.first);
        }
    }
    for (auto& [node, nbrs] : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::uint64_t TickSnapshot::estimated_edge_weight(NodeId u, NodeId v) const {
    return edge_cms_.query(canonical_edge_key(u, v));
}

std::uint64_t TickSnapshot::estimated_degree(NodeId u) const {
    return degree_cms_.query(u);
}

std::vector<NodeId> TickSnapshot::tracked_nodes(double threshold) const {
    std::vector<NodeId> out;
    auto items = node_sketch_.frequent_items(threshold, config_.fi_mode);
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.key);
    return out;
}

std::span<const NodeId> TickSnapshot::neighbors(NodeId u) const {
    auto it = adjacency_.find(u);
    if (it == adjacency_.end()) return {};
    return {it->second.data(), it->second.size()};
}

std::uint64_t TickSnapshot::tracked_pair_estimate(NodeId u, NodeId v) const {
    auto it = pair_estimates_.find(canonical_edge_key(u, v));
    return it == pair_estimates_.end() ? 0 : it->second;
}

void TickSnapshot::serialize(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_u64_le(out, tick_);
    write_u64_le(out, edge_mass_);
    write_u64_le(out, distinct_edges_);
    write_u64_le(out, dropped_pairs_);
    write_u64_le(out, config_.fi_capacity);
    write_u64_le(out, config_.resolved_pair_budget());
    write_u64_le(out, config_.fi_mode == FiThresholdMode::FractionOfMean ? 0 : 1);
    write_u64_le(out, node_sketch_.total_weight());

    edge_cms_.serialize(out);
    degree_cms_.serialize(out);

    // frequent-items entries in fixed capacity slots, sorted by key; then zero fill
    std::vector<FrequentItemsSketch::Item> items = node_sketch_.frequent_items(0.0);
    std::sort(items.begin(), items.end(),
              [](const auto& a, const auto& b) { return a.key < b.key; });
    write_u64_le(out, items.size());
    for (const auto& it : items) {
        write_u64_le(out, it.key);
        write_u64_le(out, it.count_estimate);
        write_u64_le(out, it.error_offset);
    }
    for (std::size_t i = items.size(); i < config_.fi_capacity; ++i) {
        write_u64_le(out, 0);
        write_u64_le(out, 0);
        write_u64_le(out, 0);
    }

    // tracked pairs in fixed budget slots, sorted by canonical key; then zero fill
    std::vector<std::pair<std::uint64_t, std::pair<NodeId, NodeId>>> sorted(pairs_.begin(), pairs_.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    write_u64_le(out, sorted.size());
    for (const auto& [key, uv] : sorted) {
        write_u64_le(out, key);
        write_u64_le(out, uv.first);
        write_u64_le(out, uv.second);
    }
    for (std::uint64_t i = sorted.size(); i < config_.resolved_pair_budget(); ++i) {
        write_u64_le(out, 0);
        write_u64_le(out, 0);
        write_u64_le(out, 0);
    }
}

TickSnapshot TickSnapshot::deserialize(std::istream& in) {
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParameterError("bad snapshot header: expected DWSN1");
    }
    const std::uint64_t tick = read_u64_le(in);
    const std::uint64_t edge_mass = read_u64_le(in);
    const std::uint64_t distinct = read_u64_le(in);
    const std::uint64_t dropped = read_u64_le(in);
    const std::uint64_t fi_capacity = read_u64_le(in);
    const std::uint64_t pair_budget = read_u64_le(in);
    const std::uint64_t fi_mode = read_u64_le(in);
    const std::uint64_t fi_total = read_u64_le(in);

    CountMinSketch edge = CountMinSketch::deserialize(in);
    CountMinSketch degree = CountMinSketch::deserialize(in);

    SnapshotConfig cfg;
    cfg.cms_width = edge.width();
    cfg.cms_depth = edge.depth();
    cfg.fi_capacity = static_cast<std::uint32_t>(fi_capacity);
    cfg.pair_budget = pair_budget;
    cfg.fi_mode = fi_mode == 0 ? FiThresholdMode::FractionOfMean : FiThresholdMode::FractionOfTotal;

    const std::uint64_t n_items = read_u64_le(in);
    std::vector<FrequentItemsSketch::Item> items;
    items.reserve(n_items);
    for (std::uint64_t i = 0; i < n_items; ++i) {
        FrequentItemsSketch::Item it;
        it.key = read_u64_le(in);
        it.count_estimate = read_u64_le(in);
        it.error_offset = read_u64_le(in);
        items.push_back(it);
    }
    for (std::uint64_t i = n_items; i < fi_capacity; ++i) {
        read_u64_le(in);
        read_u64_le(in);
        read_u64_le(in);
    }
    FrequentItemsSketch nodes = FrequentItemsSketch::restore(
        static_cast<std::size_t>(fi_capacity), fi_total, items);

    const std::uint64_t n_pairs = read_u64_le(in);
    std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(n_pairs);
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
        const std::uint64_t key = read_u64_le(in);
        const NodeId u = read_u64_le(in);
        const NodeId v = read_u64_le(in);
        pairs.emplace(key, std::make_pair(u, v));
    }
    for (std::uint64_t i = n_pairs; i < pair_budget; ++i) {
        read_u64_le(in);
        read_u64_le(in);
        read_u64_le(in);
    }
    if (!in) throw ParameterError("truncated snapshot payload");

    return TickSnapshot(tick, cfg, std::move(edge), std::move(degree), std::move(nodes),
                        std::move(pairs), edge_mass, distinct, dropped);
}

std::size_t TickSnapshot::serialized_size() const noexcept {
    return sizeof(kMagic) + 8 * 8
         + edge_cms_.serialized_size() + degree_cms_.serialized_size()
         + 8 + static_cast<std::size_t>(config_.fi_capacity) * 24
         + 8 + static_cast<std::size_t>(config_.resolved_pair_budget()) * 24;
}

std::uint64_t TrackedGraph::weight_between(std::uint32_t a, std::uint32_t b) const noexcept {
    const auto& nbrs = adjacency[a];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b,
                               [](const auto& entry, std::uint32_t slot) { return entry.first < slot; });
    if (it != nbrs.end() && it->first == b) return it->second;
    return 0;
}

TrackedGraph TrackedGraph::from_snapshot(const TickSnapshot& snapshot, double fi_threshold) {
    auto nodes = snapshot.tracked_nodes(fi_threshold);
    return from_nodes(snapshot, nodes);
}

TrackedGraph TrackedGraph::from_nodes(const TickSnapshot& snapshot, std::span<const NodeId> nodes) {
    TrackedGraph g;
    g.edge_mass = snapshot.edge_mass();
    g.nodes.assign(nodes.begin(), nodes.end());
    g.slot_of.reserve(g.nodes.size());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
        if (!g.slot_of.emplace(g.nodes[i], i).second) {
            throw ContractError("duplicate node id in tracked node list");
        }
    }
    g.degree.resize(g.nodes.size());
    g.self_mass.resize(g.nodes.size());
    g.adjacency.resize(g.nodes.size());
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
        const NodeId id = g.nodes[i];
        g.degree[i] = snapshot.estimated_degree(id);
        g.self_mass[i] = snapshot.tracked_pair_estimate(id, id);
        for (NodeId nb : snapshot.neighbors(id)) {
            auto it = g.slot_of.find(nb);
            if (it == g.slot_of.end()) continue; // neighbor below threshold
            g.adjacency[i].emplace_back(it->second, snapshot.tracked_pair_estimate(id, nb));
        }
        std::sort(g.adjacency[i].begin(), g.adjacency[i].end());
    }
    return g;
}

} // namespace densewatch
