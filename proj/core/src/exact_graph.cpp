#include "densewatch/exact_graph.hpp"

namespace densewatch {

void ExactGraph::add_event(NodeId u, NodeId v, std::uint64_t count) {
    if (count == 0) throw ParameterError("event count must be >= 1");
    const NodeId lo = u < v ? u : v;
    const NodeId hi = u < v ? v : u;
    edges_[{lo, hi}] += count;
    degrees_[u] += count;
    degrees_[v] += count; // self-loop: same node twice
    events_ += count;
}

std::uint64_t ExactGraph::multiplicity(NodeId u, NodeId v) const {
    const NodeId lo = u < v ? u : v;
    const NodeId hi = u < v ? v : u;
    auto it = edges_.find({lo, hi});
    return it == edges_.end() ? 0 : it->second;
}

std::uint64_t ExactGraph::degree(NodeId u) const {
    auto it = degrees_.find(u);
    return it == degrees_.end() ? 0 : it->second;
}

std::vector<NodeId> ExactGraph::node_list() const {
    std::vector<NodeId> out;
    out.reserve(degrees_.size());
    for (const auto& [node, _] : degrees_) out.push_back(node);
    return out;
}

ExactGraph exact_replay(std::span<const EdgeEvent> events) {
    ExactGraph g;
    for (const auto& ev : events) g.add_event(ev.src, ev.dst);
    return g;
}

} // namespace densewatch
