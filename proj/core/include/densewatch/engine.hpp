#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "densewatch/common.hpp"
#include "densewatch/game.hpp"
#include "densewatch/modularity.hpp"
#include "densewatch/partition.hpp"
#include "densewatch/snapshot.hpp"

namespace densewatch {

struct EngineConfig {
    double lambda = 0.8;        ///< community retention rate; 1 leaves payoff-only dynamics
    double eta = 0.99;          ///< NMI termination threshold
    std::uint32_t nmi_window = 0;     ///< iterations between checks; 0 = tracked-node count
    std::uint64_t max_iterations = 0; ///< hard stop; 0 = 50 * tracked-node count
    double fi_threshold = 0.3;  ///< frequent-items retrieval threshold
    double gamma = 1.0;         ///< resolution scaling of the null model
    RetentionVariant retention = RetentionVariant::Eq6;
    std::uint64_t seed = 1;
    bool carry_over_partition = false;
    bool verify_nash = false;   ///< run the equilibrium check on converged results

    void validate() const;
    GameParams game_params() const { return {lambda, gamma, retention}; }
};

struct TracePoint {
    std::uint64_t iteration = 0;
    double modularity = 0.0;
    std::uint64_t switches = 0;
};

struct TickResult {
    Partition partition;
    std::uint64_t iterations_used = 0;
    std::uint64_t switch_count = 0;
    bool converged = false;
    std::optional<bool> nash_verified;
    std::vector<TracePoint> modularity_trace;
};

/// One tick of the sample-evaluate-switch loop: initialize the partition
/// (carried over or all singletons), sample agents from the downweighted
/// distribution, apply strictly-improving moves, and terminate when the
/// windowed NMI against the last checkpoint reaches eta.
TickResult run_tick(const TickSnapshot& snapshot, const Partition* prev_partition,
                    const EngineConfig& config);

/// run_tick with lambda forced to 1: no retention term, and downweighting
/// degenerates to a no-op.
TickResult run_payoff_only(const TickSnapshot& snapshot, const Partition* prev_partition,
                   const EngineConfig& config);

/// True when the windowed NMI says the partition has stopped moving.
bool terminate_check(const Partition& checkpoint, const Partition& current, double eta);

struct NashReport {
    bool is_equilibrium = true;
    std::vector<NodeId> violators;
};

/// No tracked node has a candidate move with strictly higher combined
/// utility than staying put.
NashReport is_nash_equilibrium(const Partition& partition, const GameParams& params);

} // namespace densewatch
