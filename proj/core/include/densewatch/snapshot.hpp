#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/count_min_sketch.hpp"
#include "densewatch/frequent_items.hpp"

namespace densewatch {

/// One timestamped directed edge occurrence from the input stream.
struct EdgeEvent {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t tick = 0;
    /// Ground-truth flag carried through for evaluation only.
    std::optional<bool> anomalous;
};

/// Symmetric 64-bit key for the unordered pair {u, v}. (u,v) and (v,u) map to
/// the same key; (u,u) is a well-defined self-loop key.
std::uint64_t canonical_edge_key(NodeId u, NodeId v) noexcept;

/// Fixed-space budget for one tick's summary.
struct SnapshotConfig {
    std::uint32_t cms_width = 719;
    std::uint32_t cms_depth = 2;
    std::uint32_t fi_capacity = 4096;
    std::uint64_t seed = 1;
    /// Max tracked distinct edge pairs; 0 means 16 * fi_capacity.
    std::uint64_t pair_budget = 0;
    FiThresholdMode fi_mode = FiThresholdMode::FractionOfMean;

    std::uint64_t resolved_pair_budget() const noexcept {
        return pair_budget != 0 ? pair_budget : 16ULL * fi_capacity;
    }
};

class TickSnapshot;

/// Accumulates one tick's edge stream into constant-space state.
/// Single-writer; seal() freezes the result.
class SnapshotBuilder {
public:
    SnapshotBuilder(std::uint64_t tick, const SnapshotConfig& config);

    /// Feed one event. The event's tick must match the builder's.
    void ingest(const EdgeEvent& event);

    /// Freeze into an immutable snapshot. The builder is spent afterwards.
    TickSnapshot seal();

    /// Snapshot the current state without spending the builder. Together with
    /// advance_tick this supports accumulating sketches across ticks instead
    /// of resetting them per tick.
    TickSnapshot seal_copy() const;

    /// Move the builder to a later tick, keeping all accumulated state.
    void advance_tick(std::uint64_t new_tick);

    std::uint64_t tick() const noexcept { return tick_; }
    std::uint64_t edge_mass() const noexcept { return edge_mass_; }
    std::uint64_t degree_mass() const noexcept { return degree_cms_.total_mass(); }
    std::uint64_t distinct_edge_estimate() const noexcept { return distinct_edges_; }
    /// Pairs refused because the pair budget was exhausted.
    std::uint64_t dropped_pairs() const noexcept { return dropped_pairs_; }
    bool sealed() const noexcept { return sealed_; }

private:
    std::uint64_t tick_;
    SnapshotConfig config_;
    bool sealed_ = false;
    CountMinSketch edge_cms_;
    CountMinSketch degree_cms_;
    FrequentItemsSketch node_sketch_;
    // canonical key -> endpoints, bounded by the pair budget
    std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>> pairs_;
    std::uint64_t edge_mass_ = 0;
    std::uint64_t distinct_edges_ = 0;
    std::uint64_t dropped_pairs_ = 0;

    friend class TickSnapshot;
};

/// Sealed per-tick summary: edge CMS, degree CMS, frequent-node sketch,
/// bounded tracked adjacency, and the tick's totals. Immutable; safe for
/// concurrent readers.
class TickSnapshot {
public:
    std::uint64_t tick() const noexcept { return tick_; }
    std::uint64_t edge_mass() const noexcept { return edge_mass_; }
    std::uint64_t distinct_edge_estimate() const noexcept { return distinct_edges_; }
    std::uint64_t dropped_pairs() const noexcept { return dropped_pairs_; }
    const SnapshotConfig& config() const noexcept { return config_; }

    const CountMinSketch& edge_cms() const noexcept { return edge_cms_; }
    const CountMinSketch& degree_cms() const noexcept { return degree_cms_; }
    const FrequentItemsSketch& node_sketch() const noexcept { return node_sketch_; }

    /// Estimated multiplicity of the unordered pair {u, v}; symmetric.
    std::uint64_t estimated_edge_weight(NodeId u, NodeId v) const;

    /// Estimated degree mass of u (self-loops count twice).
    std::uint64_t estimated_degree(NodeId u) const;

    /// Nodes retained by the frequent-items sketch at the given threshold,
    /// ordered by descending estimate, ties by ascending id.
    std::vector<NodeId> tracked_nodes(double threshold) const;

    /// Tracked neighbors of u (empty for untracked or isolated nodes).
    std::span<const NodeId> neighbors(NodeId u) const;

    /// Cached estimate for an admitted tracked pair; 0 for pairs never admitted.
    std::uint64_t tracked_pair_estimate(NodeId u, NodeId v) const;

    const std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>>& tracked_pairs() const noexcept {
        return pairs_;
    }

    /// Fixed-footprint binary image. The size depends only on the sketch
    /// configuration, never on the stream, which is the constant-space witness.
    void serialize(std::ostream& out) const;
    static TickSnapshot deserialize(std::istream& in);
    std::size_t serialized_size() const noexcept;

private:
    friend class SnapshotBuilder;
    TickSnapshot(SnapshotBuilder&& b);
    TickSnapshot(std::uint64_t tick, SnapshotConfig cfg, CountMinSketch edge,
                 CountMinSketch degree, FrequentItemsSketch nodes,
                 std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>> pairs,
                 std::uint64_t edge_mass, std::uint64_t distinct, std::uint64_t dropped);

    void build_adjacency();

    std::uint64_t tick_;
    SnapshotConfig config_;
    CountMinSketch edge_cms_;
    CountMinSketch degree_cms_;
    FrequentItemsSketch node_sketch_;
    std::unordered_map<std::uint64_t, std::pair<NodeId, NodeId>> pairs_;
    std::unordered_map<std::uint64_t, std::uint64_t> pair_estimates_;
    std::unordered_map<NodeId, std::vector<NodeId>> adjacency_;
    std::uint64_t edge_mass_ = 0;
    std::uint64_t distinct_edges_ = 0;
    std::uint64_t dropped_pairs_ = 0;
};

/// The tracked subgraph materialized from a sealed snapshot: dense node slots,
/// estimated degrees, sorted weighted adjacency. This is what the game engine
/// and modularity math operate on.
struct TrackedGraph {
    std::vector<NodeId> nodes;                    // slot -> id, tracked order
    std::unordered_map<NodeId, std::uint32_t> slot_of;
    std::vector<std::uint64_t> degree;            // estimated degree per slot
    std::vector<std::uint64_t> self_mass;         // estimated self-loop multiplicity per slot
    // per slot: (neighbor slot, estimated pair weight), sorted by neighbor slot
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adjacency;
    std::uint64_t edge_mass = 0;

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(nodes.size()); }

    /// Estimated pair weight between two slots; 0 when not adjacent.
    std::uint64_t weight_between(std::uint32_t a, std::uint32_t b) const noexcept;

    static TrackedGraph from_snapshot(const TickSnapshot& snapshot, double fi_threshold);
    static TrackedGraph from_nodes(const TickSnapshot& snapshot, std::span<const NodeId> nodes);
};

} // namespace densewatch
