#include "densewatch/anomaly.hpp"

#include <algorithm>
#include <unordered_map>

#include "densewatch/modularity.hpp"

namespace densewatch {

std::vector<CommunityScore> dense_communities(const Partition& partition, std::uint32_t k,
                                              std::uint32_t min_size, double gamma) {
    if (k == 0) throw ParameterError("k must be >= 1");
    std::vector<CommunityScore> scored;
    for (const auto& [label, c] : partition.communities()) {
        if (c.size() < min_size) continue;
        scored.push_back({label, community_modularity(partition, label, gamma), c.size(),
                          c.internal_mass});
    }
    std::sort(scored.begin(), scored.end(), [](const CommunityScore& a, const CommunityScore& b) {
        if (a.q_c != b.q_c) return a.q_c > b.q_c;
        if (a.internal_mass != b.internal_mass) return a.internal_mass > b.internal_mass;
        return a.label < b.label;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

std::vector<EdgeFlag> score_edges(const Partition& partition,
                                  std::span<const CommunityScore> top,
                                  std::span<const EdgeEvent> events) {
    std::unordered_map<CommunityLabel, double> top_score;
    top_score.reserve(top.size());
    for (const auto& c : top) top_score.emplace(c.label, c.q_c);

    const auto& slots = partition.graph().slot_of;
    std::vector<EdgeFlag> flags;
    for (std::uint32_t i = 0; i < events.size(); ++i) {
        const auto su = slots.find(events[i].src);
        if (su == slots.end()) continue;
        const auto sv = slots.find(events[i].dst);
        if (sv == slots.end()) continue;
        const CommunityLabel lu = partition.label_of_slot(su->second);
        if (lu != partition.label_of_slot(sv->second)) continue;
        const auto hit = top_score.find(lu);
        if (hit == top_score.end()) continue;
        flags.push_back({i, lu, hit->second});
    }
    return flags;
}

EvaluationSummary evaluate(std::span<const LabeledTick> ticks) {
    EvaluationSummary summary;
    for (const auto& tick : ticks) {
        for (const auto& ev : tick.events) {
            if (!ev.anomalous.has_value()) throw ContractError("event is missing a ground-truth label");
            if (*ev.anomalous) ++summary.anomalous_event_count;
        }
        if (tick.report == nullptr || tick.report->flagged.empty()) continue;
        std::uint64_t tp = 0;
        for (const auto& flag : tick.report->flagged) {
            if (*tick.events[flag.event_index].anomalous) ++tp;
        }
        summary.flagged_count += tick.report->flagged.size();
        summary.true_positive_count += tp;
        summary.per_tick_precision.push_back(static_cast<double>(tp) /
                                             static_cast<double>(tick.report->flagged.size()));
    }
    if (!summary.per_tick_precision.empty()) {
        double sum = 0.0;
        for (double p : summary.per_tick_precision) sum += p;
        summary.mean_precision = sum / static_cast<double>(summary.per_tick_precision.size());
    }
    if (summary.anomalous_event_count > 0) {
        summary.recall = static_cast<double>(summary.true_positive_count) /
                         static_cast<double>(summary.anomalous_event_count);
    }
    return summary;
}

} // namespace densewatch
