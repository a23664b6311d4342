#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/hashing.hpp"
#include "densewatch/partition.hpp"

namespace densewatch {

/// How community retention weighs the push term for each external node.
enum class RetentionVariant {
    Eq6,     ///< push = d_ext(O) / 2m per external node (default)
    Example, ///< push = pull(O) * d_ext(O) / 2m, matching the worked demonstration
};

struct GameParams {
    double lambda = 0.8; ///< community retention rate; 1 disables retention
    double gamma = 1.0;  ///< resolution scaling of the null-model term
    RetentionVariant retention = RetentionVariant::Eq6;
};

struct UtilityBreakdown {
    double payoff_utility = 0.0;
    double retention = 0.0;
    double lambda = 1.0;
    double combined = 0.0;
};

/// lambda * payoff + (1 - lambda) * retention, with the inputs recorded.
UtilityBreakdown combined_utility(double payoff, double retention, double lambda);

/// Marginal payoff of `node` for membership in `community`: the modularity
/// gain sum over current members, the node's own membership excluded.
/// Labels with no community are the empty community (payoff 0).
double marginal_payoff(const Partition& partition, NodeId node, CommunityLabel community,
                       double gamma = 1.0);

/// Pairwise payoff q(u, v, C) = mu(u, C + v) - mu(u, C - v).
double pairwise_payoff(const Partition& partition, NodeId u, NodeId v, CommunityLabel community,
                       double gamma = 1.0);

/// Pull-minus-push sum over the community's external neighbors.
double community_retention(const Partition& partition, CommunityLabel community,
                           RetentionVariant variant = RetentionVariant::Eq6);

/// Retention the community would have after `node` joined it. Passing a label
/// with no community evaluates the fresh singleton {node}.
double community_retention_with(const Partition& partition, CommunityLabel community, NodeId node,
                                RetentionVariant variant = RetentionVariant::Eq6);

struct CandidateUtility {
    CommunityLabel target = 0;
    UtilityBreakdown utility;
};

/// Deterministic argmax: the lowest-labelled candidate strictly better than
/// stay, or nothing. Exposed separately so the tie policy is testable.
std::optional<CandidateUtility> pick_best_move(std::span<const CandidateUtility> candidates,
                                               const UtilityBreakdown& stay);

/// Evaluate the full strategy set for a node: stay, switch to each 1-hop
/// neighbor community, or leave to a fresh singleton. Returns the winning
/// move, or nothing when staying is at least as good as every alternative.
std::optional<PartitionDelta> best_strategy(const Partition& partition, NodeId node,
                                            const GameParams& params);

/// All candidate targets with their utilities, plus the stay utility; the
/// diagnostics surface behind best_strategy and the equilibrium check.
struct StrategyEvaluation {
    UtilityBreakdown stay;
    std::vector<CandidateUtility> candidates;
};
StrategyEvaluation evaluate_strategies(const Partition& partition, NodeId node,
                                       const GameParams& params);

/// Per-node sampling weights driving agent selection. Probabilities are
/// weights over their sum; downweighting a node compounds multiplicatively.
class SamplingDistribution {
public:
    static SamplingDistribution uniform(std::span<const NodeId> nodes, std::uint64_t seed);

    /// Draw one node with probability weight/total; advances the generator.
    NodeId sample();

    /// weight(node) *= lambda. lambda must be in (0, 1].
    void downweight(NodeId node, double lambda);

    double probability(NodeId node) const;
    double weight(NodeId node) const;
    double total_weight() const;
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    SamplingDistribution(std::vector<NodeId> nodes, std::uint64_t seed);
    std::uint32_t position(NodeId node) const;
    void fenwick_add(std::size_t pos, double delta);
    std::size_t fenwick_find(double target) const;

    std::vector<NodeId> nodes_;
    std::unordered_map<NodeId, std::uint32_t> pos_;
    std::vector<double> weights_;
    std::vector<double> tree_; // Fenwick tree over weights, 1-indexed
    SplitMix64 rng_;
};

} // namespace densewatch
