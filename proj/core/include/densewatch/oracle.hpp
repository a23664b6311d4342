#pragma once

#include <cstdint>
#include <map>

#include "densewatch/common.hpp"
#include "densewatch/exact_graph.hpp"
#include "densewatch/partition.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

struct ModularityComparison {
    double exact_q = 0.0;
    double approx_q = 0.0;
    double relative_error = 0.0;
    double bound = 0.0; ///< the additive slack the approximation may not exceed
    bool bound_satisfied = false;
};

/// Exact versus sketch-approximated modularity of the same partition over the
/// same stream. Graph nodes absent from the partition (dropped by tracking)
/// are treated as singletons on the exact side.
ModularityComparison compare_modularity(const ExactGraph& graph, const TickSnapshot& snapshot,
                                        const Partition& partition, double phi_avg = 0.0);

struct BestPartition {
    std::map<NodeId, CommunityLabel> labels;
    double q = 0.0;
};

/// Exhaustive search over all set partitions (n <= 10 nodes) for a modularity
/// maximizer.
BestPartition brute_force_best_partition(const ExactGraph& graph);

} // namespace densewatch
