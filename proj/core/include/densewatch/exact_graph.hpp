#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

/// Unbounded-memory undirected multigraph: exact multiplicities, exact
/// degrees, exact totals. Reference ground truth for everything the sketches
/// approximate.
class ExactGraph {
public:
    void add_event(NodeId u, NodeId v, std::uint64_t count = 1);

    /// Total events (m). Self-loops count once here, twice in degrees.
    std::uint64_t event_count() const noexcept { return events_; }
    std::uint64_t distinct_edges() const noexcept { return static_cast<std::uint64_t>(edges_.size()); }

    std::uint64_t multiplicity(NodeId u, NodeId v) const;
    std::uint64_t degree(NodeId u) const;

    const std::map<std::pair<NodeId, NodeId>, std::uint64_t>& edges() const noexcept { return edges_; }
    const std::map<NodeId, std::uint64_t>& degrees() const noexcept { return degrees_; }

    std::vector<NodeId> node_list() const;
    std::size_t node_count() const noexcept { return degrees_.size(); }

private:
    std::map<std::pair<NodeId, NodeId>, std::uint64_t> edges_; // key: (min, max)
    std::map<NodeId, std::uint64_t> degrees_;
    std::uint64_t events_ = 0;
};

/// Replay an event list into an exact graph using the same canonicalization
/// as the snapshot path.
ExactGraph exact_replay(std::span<const EdgeEvent> events);

} // namespace densewatch
