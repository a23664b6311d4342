#include "densewatch/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace densewatch {

UtilityBreakdown combined_utility(double payoff, double retention, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must be in [0, 1]");
    UtilityBreakdown u;
    u.payoff_utility = payoff;
    u.retention = retention;
    u.lambda = lambda;
    u.combined = lambda * payoff + (1.0 - lambda) * retention;
    return u;
}

namespace {

/// mu of `slot` over an explicit member set (slot excluded if present).
double payoff_over_members(const TrackedGraph& g, std::uint32_t slot,
                           const std::set<std::uint32_t>& members, double gamma) {
    if (g.edge_mass == 0) throw DegenerateInputError("payoff undefined when edge mass is zero");
    const double two_m = 2.0 * static_cast<double>(g.edge_mass);
    const double k_i = static_cast<double>(g.degree[slot]);
    double sum = 0.0;
    for (std::uint32_t j : members) {
        if (j == slot) continue;
        sum += static_cast<double>(g.weight_between(slot, j)) -
               gamma * k_i * static_cast<double>(g.degree[j]) / two_m;
    }
    return sum;
}

/// Retention over an explicit external map: external slot -> mass into C.
double retention_over_externals(const TrackedGraph& g,
                                const std::map<std::uint32_t, std::uint64_t>& externals,
                                RetentionVariant variant) {
    if (g.edge_mass == 0) throw DegenerateInputError("retention undefined when edge mass is zero");
    const double two_m = 2.0 * static_cast<double>(g.edge_mass);
    double sum = 0.0;
    for (const auto& [o, mass] : externals) {
        const double pull = static_cast<double>(mass);
        const double d_ext = static_cast<double>(g.degree[o]) - pull; // degree mass outside C
        switch (variant) {
        case RetentionVariant::Eq6:
            sum += pull - d_ext / two_m;
            break;
        case RetentionVariant::Example:
            sum += pull - pull * d_ext / two_m;
            break;
        }
    }
    return sum;
}

/// External map of community ∪ {slot} without mutating the partition.
std::map<std::uint32_t, std::uint64_t>
externals_with_member(const Partition& p, CommunityLabel label, std::uint32_t slot) {
    std::map<std::uint32_t, std::uint64_t> ext;
    const Community* c = p.has_community(label) ? &p.community(label) : nullptr;
    if (c != nullptr && c->members.contains(slot)) return c->external_mass;
    if (c != nullptr) ext = c->external_mass;
    ext.erase(slot);
    const auto& g = p.graph();
    for (const auto& [nbr, w] : g.adjacency[slot]) {
        if (c != nullptr && c->members.contains(nbr)) continue;
        ext[nbr] += w;
    }
    return ext;
}

} // namespace

double marginal_payoff(const Partition& partition, NodeId node, CommunityLabel community,
                       double gamma) {
    const auto& g = partition.graph();
    if (g.edge_mass == 0) throw DegenerateInputError("payoff undefined when edge mass is zero");
    const std::uint32_t slot = partition.slot_of(node);
    if (!partition.has_community(community)) return 0.0; // empty community

    const Community& c = partition.community(community);
    const double two_m = 2.0 * static_cast<double>(g.edge_mass);
    const double k_i = static_cast<double>(g.degree[slot]);

    std::uint64_t adjacent_mass = 0;
    for (const auto& [nbr, w] : g.adjacency[slot]) {
        if (partition.label_of_slot(nbr) == community) adjacent_mass += w;
    }
    double other_degree = static_cast<double>(c.degree_mass);
    if (c.members.contains(slot)) other_degree -= k_i;
    return static_cast<double>(adjacent_mass) - gamma * k_i * other_degree / two_m;
}

double pairwise_payoff(const Partition& partition, NodeId u, NodeId v, CommunityLabel community,
                       double gamma) {
    const std::uint32_t su = partition.slot_of(u);
    const std::uint32_t sv = partition.slot_of(v);

    std::set<std::uint32_t> with;
    if (partition.has_community(community)) with = partition.community(community).members;
    std::set<std::uint32_t> without = with;
    with.insert(sv);
    without.erase(sv);

    const auto& g = partition.graph();
    return payoff_over_members(g, su, with, gamma) - payoff_over_members(g, su, without, gamma);
}

double community_retention(const Partition& partition, CommunityLabel community,
                           RetentionVariant variant) {
    const Community& c = partition.community(community);
    return retention_over_externals(partition.graph(), c.external_mass, variant);
}

double community_retention_with(const Partition& partition, CommunityLabel community, NodeId node,
                                RetentionVariant variant) {
    const std::uint32_t slot = partition.slot_of(node);
    const auto ext = externals_with_member(partition, community, slot);
    return retention_over_externals(partition.graph(), ext, variant);
}

std::optional<CandidateUtility> pick_best_move(std::span<const CandidateUtility> candidates,
                                               const UtilityBreakdown& stay) {
    const CandidateUtility* best = nullptr;
    for (const auto& cand : candidates) {
        if (best == nullptr || cand.utility.combined > best->utility.combined) best = &cand;
    }
    if (best == nullptr || !(best->utility.combined > stay.combined)) return std::nullopt;
    return *best;
}

StrategyEvaluation evaluate_strategies(const Partition& partition, NodeId node,
                                       const GameParams& params) {
    const std::uint32_t slot = partition.slot_of(node);
    const auto& g = partition.graph();
    const CommunityLabel current = partition.label_of_slot(slot);

    auto utility_for = [&](CommunityLabel target, bool is_current) {
        const double payoff = marginal_payoff(partition, node, target, params.gamma);
        double retention = 0.0;
        if (params.lambda < 1.0) {
            retention = is_current
                ? community_retention(partition, target, params.retention)
                : community_retention_with(partition, target, node, params.retention);
        }
        return combined_utility(payoff, retention, params.lambda);
    };

    StrategyEvaluation eval;
    eval.stay = utility_for(current, true);

    std::set<CommunityLabel> targets; // ascending label order drives tie-breaks
    for (const auto& [nbr, _] : g.adjacency[slot]) {
        const CommunityLabel l = partition.label_of_slot(nbr);
        if (l != current) targets.insert(l);
    }
    eval.candidates.reserve(targets.size() + 1);
    for (CommunityLabel target : targets) {
        eval.candidates.push_back({target, utility_for(target, false)});
    }
    // leave to a fresh singleton, unless the node already is one
    if (partition.community(current).size() > 1) {
        eval.candidates.push_back({partition.fresh_label(), utility_for(partition.fresh_label(), false)});
    }
    return eval;
}

std::optional<PartitionDelta> best_strategy(const Partition& partition, NodeId node,
                                            const GameParams& params) {
    const auto eval = evaluate_strategies(partition, node, params);
    const auto best = pick_best_move(eval.candidates, eval.stay);
    if (!best) return std::nullopt;
    PartitionDelta delta;
    delta.node = node;
    delta.old_label = partition.label_of(node);
    delta.new_label = best->target;
    delta.utility_gained = best->utility.combined - eval.stay.combined;
    return delta;
}

SamplingDistribution::SamplingDistribution(std::vector<NodeId> nodes, std::uint64_t seed)
    : nodes_(std::move(nodes)), rng_(mix64(seed)) {
    if (nodes_.empty()) throw ParameterError("sampling distribution needs at least one node");
    pos_.reserve(nodes_.size());
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        if (!pos_.emplace(nodes_[i], i).second) throw ParameterError("duplicate node in distribution");
    }
    weights_.assign(nodes_.size(), 1.0);
    tree_.assign(nodes_.size() + 1, 0.0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) fenwick_add(i, 1.0);
}

SamplingDistribution SamplingDistribution::uniform(std::span<const NodeId> nodes,
                                                   std::uint64_t seed) {
    return SamplingDistribution(std::vector<NodeId>(nodes.begin(), nodes.end()), seed);
}

std::uint32_t SamplingDistribution::position(NodeId node) const {
    auto it = pos_.find(node);
    if (it == pos_.end()) throw ContractError("node is not in the distribution");
    return it->second;
}

void SamplingDistribution::fenwick_add(std::size_t pos, double delta) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
}

std::size_t SamplingDistribution::fenwick_find(double target) const {
    // smallest index with prefix sum > target
    std::size_t pos = 0;
    std::size_t mask = 1;
    while ((mask << 1) < tree_.size()) mask <<= 1;
    for (; mask != 0; mask >>= 1) {
        const std::size_t next = pos + mask;
        if (next < tree_.size() && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    return pos; // 0-based slot
}

NodeId SamplingDistribution::sample() {
    const double target = rng_.next_unit() * total_weight();
    std::size_t pos = fenwick_find(target);
    if (pos >= nodes_.size()) pos = nodes_.size() - 1; // guard the top float edge
    return nodes_[pos];
}

void SamplingDistribution::downweight(NodeId node, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ParameterError("lambda must be in (0, 1]");
    const std::uint32_t p = position(node);
    const double updated = weights_[p] * lambda;
    fenwick_add(p, updated - weights_[p]);
    weights_[p] = updated;
}

double SamplingDistribution::probability(NodeId node) const {
    return weights_[position(node)] / total_weight();
}

double SamplingDistribution::weight(NodeId node) const {
    return weights_[position(node)];
}

double SamplingDistribution::total_weight() const {
    double sum = 0.0;
    for (std::size_t i = tree_.size() - 1; i != 0; i &= i - 1) sum += tree_[i];
    return sum;
}

} // namespace densewatch
