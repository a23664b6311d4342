#pragma once

// Shared graph fixtures, stream generators, and independent oracles used by
// the unit and acceptance suites.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "densewatch/exact_graph.hpp"
#include "densewatch/partition.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch::testing {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

/// One event per listed pair, all in the given tick.
std::vector<EdgeEvent> events_from_pairs(const EdgeList& pairs, std::uint64_t tick = 0);

TickSnapshot build_snapshot(std::span<const EdgeEvent> events, const SnapshotConfig& config,
                            std::uint64_t tick = 0);

/// Snapshot wide enough to be collision-free for small fixtures; throws if
/// any estimate disagrees with the exact replay, so tests built on it can
/// assume exactness.
TickSnapshot exact_snapshot(std::span<const EdgeEvent> events, std::uint64_t seed = 1);

/// Tracked graph + singleton partition over an exact snapshot (threshold 0).
Partition exact_singletons(const TickSnapshot& snapshot);

/// Independent route for Eq-style modularity: the ordered-pair double sum,
/// with A_ii twice the self-loop multiplicity.
double naive_modularity(const ExactGraph& graph, const std::map<NodeId, CommunityLabel>& labels);

// --- small fixed graphs ---------------------------------------------------

EdgeList single_edge();
EdgeList triangle();              // nodes 1..3
EdgeList two_triangles();         // {1,2,3} and {4,5,6}
EdgeList path(std::uint32_t n);   // 1-2-...-n
EdgeList cycle(std::uint32_t n);
EdgeList clique(std::uint32_t n);
EdgeList star(std::uint32_t leaves); // center 1
EdgeList karate_club();           // 34 nodes, 78 edges

struct Fixture {
    std::string name;
    EdgeList edges;
};
/// Twenty graphs with at most 8 nodes each, all with m >= 1.
std::vector<Fixture> small_fixture_suite();

// --- the worked retention example ------------------------------------------

/// Fixture realizing the demonstration arithmetic: m = 13, community one with
/// two external neighbors (pull 3 each, external degrees summing to 5),
/// community two with pull 4. Node ids: 1..3 community one, 4..6 community
/// two, 7 = heavy external, 8 = light external, 9 = joining node, 10/11 leaves.
struct RetentionExample {
    std::vector<EdgeEvent> events;
    std::vector<NodeId> community_one; // {1,2,3}
    std::vector<NodeId> community_two; // {4,5,6}
};
RetentionExample retention_example();

// --- stream generators ------------------------------------------------------

struct PlantedConfig {
    std::uint32_t blocks = 4;
    std::uint32_t nodes_per_block = 50;
    std::uint32_t intra_pairs_per_block = 100;
    std::uint32_t intra_multiplicity = 1;
    std::uint32_t inter_pairs = 60;
    std::uint32_t inter_multiplicity = 1;
    std::uint64_t tick = 0;
};

/// Random planted-community events; truth labels (block index per node id)
/// returned through `truth` when non-null.
std::vector<EdgeEvent> planted_block_events(const PlantedConfig& config, std::uint64_t seed,
                                            std::map<NodeId, CommunityLabel>* truth = nullptr);

/// One tick of the approximation-quality stream: six 8-node blocks with heavy
/// intra multiplicities plus sparse inter noise. Small distinct-edge count by
/// design so the default-sized sketch stays accurate.
std::vector<EdgeEvent> approx_quality_tick(std::uint64_t tick, std::uint64_t seed);

/// Labeled planted-anomaly stream written as CSV: dense anomalous blocks
/// (label 1) injected into a sparse background (label 0), `ticks` ticks.
std::string planted_anomaly_csv(std::uint32_t ticks, std::uint64_t seed);

/// Uniform-random multigraph events: `edges` pairs over `n` nodes.
std::vector<EdgeEvent> random_graph_events(std::uint32_t n, std::uint32_t edges,
                                           std::uint64_t seed, std::uint32_t max_multiplicity = 1);

} // namespace densewatch::testing
