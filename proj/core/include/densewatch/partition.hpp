#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

/// Outcome of one applied strategy: a node moving between communities.
struct PartitionDelta {
    NodeId node = 0;
    CommunityLabel old_label = 0;
    CommunityLabel new_label = 0;
    double utility_gained = 0.0;
};

/// Per-community aggregates, maintained incrementally and exactly (all
/// integer masses), so recomputation from scratch matches bit-for-bit.
struct Community {
    std::set<std::uint32_t> members;           ///< node slots
    std::uint64_t internal_mass = 0;           ///< intra-community event mass incl self-loops
    std::uint64_t degree_mass = 0;             ///< sum of member degree estimates
    std::map<std::uint32_t, std::uint64_t> external_mass; ///< external slot -> mass into this community

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(members.size()); }
};

/// Assignment of tracked nodes to community labels plus per-community
/// aggregates, bound to the TrackedGraph it was computed from.
class Partition {
public:
    static Partition singletons(std::shared_ptr<const TrackedGraph> graph);
    static Partition from_labels(std::shared_ptr<const TrackedGraph> graph,
                                 std::span<const CommunityLabel> labels);
    /// Previous-tick labels for surviving nodes; new nodes become singletons.
    static Partition from_carryover(std::shared_ptr<const TrackedGraph> graph,
                                    const std::unordered_map<NodeId, CommunityLabel>& previous);

    const TrackedGraph& graph() const noexcept { return *graph_; }
    const std::shared_ptr<const TrackedGraph>& graph_ptr() const noexcept { return graph_; }

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(labels_.size()); }
    const std::vector<CommunityLabel>& labels() const noexcept { return labels_; }
    CommunityLabel label_of_slot(std::uint32_t slot) const { return labels_.at(slot); }
    CommunityLabel label_of(NodeId node) const;
    std::uint32_t slot_of(NodeId node) const;

    const std::map<CommunityLabel, Community>& communities() const noexcept { return comms_; }
    const Community& community(CommunityLabel label) const;
    bool has_community(CommunityLabel label) const { return comms_.contains(label); }

    /// Smallest label that is not in use; target for "leave to a fresh singleton".
    CommunityLabel fresh_label() const noexcept { return next_label_; }

    /// Move delta.node from old_label to new_label, updating all aggregates.
    void apply_move(const PartitionDelta& delta);

    std::unordered_map<NodeId, CommunityLabel> to_label_map() const;

    /// Rebuild all aggregates from scratch and compare with the maintained
    /// state. Exact integer comparison.
    bool aggregates_consistent() const;

private:
    Partition() = default;
    void rebuild();

    std::shared_ptr<const TrackedGraph> graph_;
    std::vector<CommunityLabel> labels_;
    std::map<CommunityLabel, Community> comms_;
    CommunityLabel next_label_ = 0;
};

} // namespace densewatch
