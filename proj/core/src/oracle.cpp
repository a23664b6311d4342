#include "densewatch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "densewatch/modularity.hpp"

namespace densewatch {

ModularityComparison compare_modularity(const ExactGraph& graph, const TickSnapshot& snapshot,
                                        const Partition& partition, double phi_avg) {
    if (graph.event_count() == 0) throw DegenerateInputError("empty stream");

    std::map<NodeId, CommunityLabel> labels;
    for (std::uint32_t s = 0; s < partition.size(); ++s) {
        labels.emplace(partition.graph().nodes[s], partition.labels()[s]);
    }
    CommunityLabel next = partition.fresh_label();
    for (NodeId node : graph.node_list()) {
        if (!labels.contains(node)) labels.emplace(node, next++);
    }

    ModularityComparison cmp;
    cmp.exact_q = exact_modularity(graph, labels);
    cmp.approx_q = approx_modularity(partition);
    cmp.relative_error = std::abs(cmp.approx_q - cmp.exact_q) / std::max(std::abs(cmp.exact_q), 1e-12);
    cmp.bound = modularity_error_bound(snapshot, snapshot.edge_cms().epsilon(), phi_avg).value;
    cmp.bound_satisfied = cmp.approx_q <= cmp.exact_q + cmp.bound;
    return cmp;
}

namespace {

double evaluate_assignment(const ExactGraph& graph, const std::vector<NodeId>& nodes,
                           const std::vector<CommunityLabel>& assignment) {
    const double m = static_cast<double>(graph.event_count());
    std::vector<std::uint64_t> internal(nodes.size(), 0);
    std::vector<std::uint64_t> degree(nodes.size(), 0);
    std::map<NodeId, CommunityLabel> label_of;
    for (std::size_t i = 0; i < nodes.size(); ++i) label_of.emplace(nodes[i], assignment[i]);
    for (const auto& [uv, mult] : graph.edges()) {
        if (label_of[uv.first] == label_of[uv.second]) internal[label_of[uv.first]] += mult;
    }
    for (const auto& [node, k] : graph.degrees()) degree[label_of[node]] += k;

    double q = 0.0;
    for (std::size_t c = 0; c < nodes.size(); ++c) {
        if (degree[c] == 0 && internal[c] == 0) continue;
        const double frac = static_cast<double>(degree[c]) / (2.0 * m);
        q += static_cast<double>(internal[c]) / m - frac * frac;
    }
    return q;
}

} // namespace

BestPartition brute_force_best_partition(const ExactGraph& graph) {
    if (graph.event_count() == 0) throw DegenerateInputError("empty graph");
    const std::vector<NodeId> nodes = graph.node_list();
    const std::size_t n = nodes.size();
    if (n > 10) throw ParameterError("brute force is capped at 10 nodes");

    // enumerate set partitions as restricted growth strings
    std::vector<CommunityLabel> assignment(n, 0);
    std::vector<CommunityLabel> best_assignment(n, 0);
    double best_q = evaluate_assignment(graph, nodes, assignment);

    auto max_prefix = [&](std::size_t upto) {
        CommunityLabel mx = 0;
        for (std::size_t i = 0; i < upto; ++i) mx = std::max(mx, assignment[i]);
        return mx;
    };
    auto advance = [&]() {
        for (std::size_t i = n - 1; i >= 1; --i) {
            if (assignment[i] <= max_prefix(i)) {
                ++assignment[i];
                std::fill(assignment.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                          assignment.end(), 0);
                return true;
            }
        }
        return false;
    };

    if (n > 1) {
        while (advance()) {
            const double q = evaluate_assignment(graph, nodes, assignment);
            if (q > best_q) {
                best_q = q;
                best_assignment = assignment;
            }
        }
    }

    BestPartition best;
    best.q = best_q;
    for (std::size_t i = 0; i < n; ++i) best.labels.emplace(nodes[i], best_assignment[i]);
    return best;
}

} // namespace densewatch
