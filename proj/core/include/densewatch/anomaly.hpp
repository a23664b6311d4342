#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/partition.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

struct CommunityScore {
    CommunityLabel label = 0;
    double q_c = 0.0;
    std::uint32_t size = 0;
    std::uint64_t internal_mass = 0;
};

/// Top-K communities of at least min_size members, by descending per-community
/// modularity; ties by larger internal mass, then lower label. May return
/// fewer than K.
std::vector<CommunityScore> dense_communities(const Partition& partition, std::uint32_t k,
                                              std::uint32_t min_size, double gamma = 1.0);

struct EdgeFlag {
    std::uint32_t event_index = 0; ///< index into the tick's event list
    CommunityLabel community = 0;
    double score = 0.0;            ///< the containing community's modularity share
};

/// Flag the tick's events whose endpoints share one of the top communities.
/// Events with untracked endpoints are never flagged.
std::vector<EdgeFlag> score_edges(const Partition& partition,
                                  std::span<const CommunityScore> top,
                                  std::span<const EdgeEvent> events);

struct AnomalyReport {
    std::uint64_t tick = 0;
    std::vector<CommunityScore> top_communities;
    std::vector<EdgeFlag> flagged;
    std::uint32_t k = 0;
    std::uint32_t min_size = 0;
};

struct LabeledTick {
    const AnomalyReport* report = nullptr;
    std::span<const EdgeEvent> events;
};

struct EvaluationSummary {
    std::vector<double> per_tick_precision; ///< ticks with >= 1 flag only
    std::optional<double> mean_precision;   ///< empty when no tick flagged anything
    std::uint64_t flagged_count = 0;
    std::uint64_t true_positive_count = 0;
    std::uint64_t anomalous_event_count = 0;
    std::optional<double> recall;
};

/// Precision of the flags against ground-truth labels. Every event must carry
/// a label.
EvaluationSummary evaluate(std::span<const LabeledTick> ticks);

} // namespace densewatch
