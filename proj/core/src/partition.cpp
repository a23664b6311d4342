#include "densewatch/partition.hpp"

#include <algorithm>

namespace densewatch {

Partition Partition::singletons(std::shared_ptr<const TrackedGraph> graph) {
    Partition p;
    p.graph_ = std::move(graph);
    const std::uint32_t n = p.graph_->size();
    p.labels_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) p.labels_[i] = i;
    p.next_label_ = n;
    p.rebuild();
    return p;
}

Partition Partition::from_labels(std::shared_ptr<const TrackedGraph> graph,
                                 std::span<const CommunityLabel> labels) {
    if (labels.size() != graph->size()) {
        throw ContractError("label vector size does not match tracked node count");
    }
    Partition p;
    p.graph_ = std::move(graph);
    p.labels_.assign(labels.begin(), labels.end());
    CommunityLabel next = 0;
    for (CommunityLabel l : p.labels_) next = std::max(next, l + 1);
    p.next_label_ = next;
    p.rebuild();
    return p;
}

Partition Partition::from_carryover(std::shared_ptr<const TrackedGraph> graph,
                                    const std::unordered_map<NodeId, CommunityLabel>& previous) {
    Partition p;
    p.graph_ = std::move(graph);
    const std::uint32_t n = p.graph_->size();
    p.labels_.resize(n);
    CommunityLabel next = 0;
    for (const auto& [_, label] : previous) next = std::max(next, label + 1);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto it = previous.find(p.graph_->nodes[i]);
        p.labels_[i] = it != previous.end() ? it->second : next++;
    }
    p.next_label_ = next;
    p.rebuild();
    return p;
}

void Partition::rebuild() {
    comms_.clear();
    const auto& g = *graph_;
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        Community& c = comms_[labels_[s]];
        c.members.insert(s);
        c.degree_mass += g.degree[s];
        c.internal_mass += g.self_mass[s];
    }
    for (std::uint32_t s = 0; s < g.size(); ++s) {
        Community& c = comms_[labels_[s]];
        for (const auto& [nbr, w] : g.adjacency[s]) {
            if (labels_[nbr] == labels_[s]) {
                if (s < nbr) c.internal_mass += w; // count each unordered pair once
            } else {
                c.external_mass[nbr] += w;
            }
        }
    }
}

CommunityLabel Partition::label_of(NodeId node) const {
    return labels_[slot_of(node)];
}

std::uint32_t Partition::slot_of(NodeId node) const {
    auto it = graph_->slot_of.find(node);
    if (it == graph_->slot_of.end()) throw ContractError("node is not tracked");
    return it->second;
}

const Community& Partition::community(CommunityLabel label) const {
    auto it = comms_.find(label);
    if (it == comms_.end()) throw LookupError("unknown community label");
    return it->second;
}

void Partition::apply_move(const PartitionDelta& delta) {
    const std::uint32_t s = slot_of(delta.node);
    if (delta.old_label == delta.new_label) throw ContractError("move must change the label");
    if (labels_[s] != delta.old_label) throw ContractError("stale move: node is not in old_label");

    const auto& g = *graph_;
    auto old_it = comms_.find(delta.old_label);
    Community& from = old_it->second;
    Community& to = comms_[delta.new_label]; // may create the fresh singleton target

    from.members.erase(s);
    from.degree_mass -= g.degree[s];
    from.internal_mass -= g.self_mass[s];
    to.members.insert(s);
    to.degree_mass += g.degree[s];
    to.internal_mass += g.self_mass[s];
    to.external_mass.erase(s);

    std::uint64_t mass_to_old = 0;
    for (const auto& [nbr, w] : g.adjacency[s]) {
        const CommunityLabel nl = labels_[nbr];
        if (nl == delta.old_label) {
            from.internal_mass -= w;
            mass_to_old += w;
            to.external_mass[nbr] += w;
            continue;
        }
        // the neighbor was external to the old community through s
        auto ext = from.external_mass.find(nbr);
        ext->second -= w;
        if (ext->second == 0) from.external_mass.erase(ext);
        if (nl == delta.new_label) {
            to.internal_mass += w;
        } else {
            to.external_mass[nbr] += w;
        }
    }
    if (mass_to_old > 0) from.external_mass[s] = mass_to_old;
    if (from.members.empty()) comms_.erase(old_it);

    labels_[s] = delta.new_label;
    next_label_ = std::max(next_label_, delta.new_label + 1);
}

std::unordered_map<NodeId, CommunityLabel> Partition::to_label_map() const {
    std::unordered_map<NodeId, CommunityLabel> out;
    out.reserve(labels_.size());
    for (std::uint32_t s = 0; s < labels_.size(); ++s) out.emplace(graph_->nodes[s], labels_[s]);
    return out;
}

bool Partition::aggregates_consistent() const {
    Partition fresh;
    fresh.graph_ = graph_;
    fresh.labels_ = labels_;
    fresh.rebuild();
    return fresh.comms_.size() == comms_.size() &&
           std::equal(comms_.begin(), comms_.end(), fresh.comms_.begin(),
                      [](const auto& a, const auto& b) {
                          return a.first == b.first && a.second.members == b.second.members &&
                                 a.second.internal_mass == b.second.internal_mass &&
                                 a.second.degree_mass == b.second.degree_mass &&
                                 a.second.external_mass == b.second.external_mass;
                      });
}

} // namespace densewatch
