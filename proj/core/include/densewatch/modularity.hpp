#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "densewatch/common.hpp"
#include "densewatch/exact_graph.hpp"
#include "densewatch/partition.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

/// Modularity of a labelled exact graph. Ordered-pair sum including i = j,
/// with A_ii twice the self-loop multiplicity so that degrees sum to 2m.
/// The label map must cover every node of the graph.
double exact_modularity(const ExactGraph& graph,
                        const std::map<NodeId, CommunityLabel>& labels);

/// Sketch-approximated modularity of a partition: estimated pair weights over
/// the tracked adjacency, the degree null model over all within-community
/// pairs. gamma scales the null-model term; 1.0 is the plain definition.
double approx_modularity(const Partition& partition, double gamma = 1.0);

/// One community's share: w_in(C)/m - gamma * (d(C)/2m)^2. Over all labels
/// these sum exactly to approx_modularity.
double community_modularity(const Partition& partition, CommunityLabel label, double gamma = 1.0);

/// Normalized mutual information between two label vectors over the same
/// node sequence. 1 when identical up to relabeling; 1 when both partitions
/// are trivial; 0 when exactly one is.
double nmi(std::span<const CommunityLabel> a, std::span<const CommunityLabel> b);
double nmi(const Partition& a, const Partition& b);

struct ModularityBound {
    double value = 0.0;
    bool clamped = false; ///< negative raw value clamped to zero
};

/// V_u * (epsilon_e / 2 - phi_avg): the additive slack such that the
/// approximate modularity never exceeds the exact one by more than it.
ModularityBound modularity_error_bound(const TickSnapshot& snapshot, double epsilon_e,
                                       double phi_avg = 0.0);

} // namespace densewatch
