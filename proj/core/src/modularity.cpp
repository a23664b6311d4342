#include "densewatch/modularity.hpp"

#include <cmath>
#include <unordered_map>

namespace densewatch {

double exact_modularity(const ExactGraph& graph,
                        const std::map<NodeId, CommunityLabel>& labels) {
    const std::uint64_t m = graph.event_count();
    if (m == 0) throw DegenerateInputError("modularity is undefined on an empty graph");

    std::map<CommunityLabel, std::uint64_t> internal;
    std::map<CommunityLabel, std::uint64_t> degree;
    for (const auto& [node, k] : graph.degrees()) {
        auto it = labels.find(node);
        if (it == labels.end()) throw ContractError("partition does not cover the graph");
        degree[it->second] += k;
    }
    for (const auto& [uv, mult] : graph.edges()) {
        const CommunityLabel lu = labels.at(uv.first);
        const CommunityLabel lv = labels.at(uv.second);
        if (lu == lv) internal[lu] += mult;
    }

    const double two_m = 2.0 * static_cast<double>(m);
    double q = 0.0;
    for (const auto& [label, d] : degree) {
        const auto in_it = internal.find(label);
        const double w_in = in_it == internal.end() ? 0.0 : static_cast<double>(in_it->second);
        const double frac = static_cast<double>(d) / two_m;
        q += w_in / static_cast<double>(m) - frac * frac;
    }
    return q;
}

namespace {

double community_share(const Community& c, std::uint64_t edge_mass, double gamma) {
    const double m = static_cast<double>(edge_mass);
    const double frac = static_cast<double>(c.degree_mass) / (2.0 * m);
    return static_cast<double>(c.internal_mass) / m - gamma * frac * frac;
}

} // namespace

double approx_modularity(const Partition& partition, double gamma) {
    const std::uint64_t m = partition.graph().edge_mass;
    if (m == 0) throw DegenerateInputError("modularity is undefined on an empty snapshot");
    double q = 0.0;
    for (const auto& [label, c] : partition.communities()) q += community_share(c, m, gamma);
    return q;
}

double community_modularity(const Partition& partition, CommunityLabel label, double gamma) {
    const std::uint64_t m = partition.graph().edge_mass;
    if (m == 0) throw DegenerateInputError("modularity is undefined on an empty snapshot");
    return community_share(partition.community(label), m, gamma);
}

double nmi(std::span<const CommunityLabel> a, std::span<const CommunityLabel> b) {
    if (a.size() != b.size()) throw ContractError("partitions cover different node sets");
    const std::size_t n = a.size();
    if (n == 0) throw ContractError("partitions are empty");

    std::unordered_map<std::uint64_t, std::uint64_t> joint;
    std::unordered_map<CommunityLabel, std::uint64_t> ca, cb;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[(static_cast<std::uint64_t>(a[i]) << 32) | b[i]];
        ++ca[a[i]];
        ++cb[b[i]];
    }

    const double dn = static_cast<double>(n);
    auto entropy = [dn](const auto& counts) {
        double h = 0.0;
        for (const auto& [_, c] : counts) {
            const double p = static_cast<double>(c) / dn;
            h -= p * std::log(p);
        }
        return h;
    };
    const double ha = entropy(ca);
    const double hb = entropy(cb);
    if (ha == 0.0 && hb == 0.0) return 1.0;
    if (ha == 0.0 || hb == 0.0) return 0.0;

    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        const auto na = ca[static_cast<CommunityLabel>(key >> 32)];
        const auto nb = cb[static_cast<CommunityLabel>(key & 0xffffffffULL)];
        const double p = static_cast<double>(c) / dn;
        mi += p * std::log(dn * static_cast<double>(c) /
                           (static_cast<double>(na) * static_cast<double>(nb)));
    }
    return 2.0 * mi / (ha + hb);
}

double nmi(const Partition& a, const Partition& b) {
    if (a.graph().nodes != b.graph().nodes) throw ContractError("partitions cover different node sets");
    return nmi(std::span<const CommunityLabel>(a.labels()), std::span<const CommunityLabel>(b.labels()));
}

ModularityBound modularity_error_bound(const TickSnapshot& snapshot, double epsilon_e,
                                       double phi_avg) {
    const double raw = static_cast<double>(snapshot.distinct_edge_estimate()) *
                       (epsilon_e / 2.0 - phi_avg);
    if (raw < 0.0) return {0.0, true};
    return {raw, false};
}

} // namespace densewatch
