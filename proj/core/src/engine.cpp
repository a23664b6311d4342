#include "densewatch/engine.hpp"

#include <memory>

#include "densewatch/hashing.hpp"

namespace densewatch {

void EngineConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must be in [0, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must be in (0, 1]");
    if (!(fi_threshold >= 0.0 && fi_threshold <= 1.0)) throw ParameterError("fi_threshold must be in [0, 1]");
    if (!(gamma > 0.0)) throw ParameterError("gamma must be > 0");
}

namespace {

void record_trace(std::vector<TracePoint>& trace, std::uint64_t iteration, double q,
                  std::uint64_t switches) {
    if (!trace.empty() && trace.back().iteration == iteration) {
        trace.back().modularity = q;
        trace.back().switches = switches;
        return;
    }
    trace.push_back({iteration, q, switches});
}

bool any_improving_move(const Partition& partition, const GameParams& params) {
    for (NodeId node : partition.graph().nodes) {
        if (best_strategy(partition, node, params)) return true;
    }
    return false;
}

} // namespace

TickResult run_tick(const TickSnapshot& snapshot, const Partition* prev_partition,
                    const EngineConfig& config) {
    config.validate();
    auto graph = std::make_shared<const TrackedGraph>(
        TrackedGraph::from_snapshot(snapshot, config.fi_threshold));
    const std::uint32_t n = graph->size();
    if (n == 0) throw DegenerateInputError("no tracked nodes in snapshot");

    Partition partition = (config.carry_over_partition && prev_partition != nullptr)
        ? Partition::from_carryover(graph, prev_partition->to_label_map())
        : Partition::singletons(graph);

    SamplingDistribution sampler =
        SamplingDistribution::uniform(graph->nodes, mix64(config.seed ^ 0xd1e7a11ce5c0ffeeULL));
    const std::uint64_t window = config.nmi_window != 0 ? config.nmi_window : n;
    const std::uint64_t max_iterations =
        config.max_iterations != 0 ? config.max_iterations : 50ULL * n;
    const GameParams params = config.game_params();

    TickResult result{std::move(partition)};
    std::vector<CommunityLabel> checkpoint = result.partition.labels();
    record_trace(result.modularity_trace, 0, approx_modularity(result.partition, config.gamma), 0);

    for (std::uint64_t it = 1; it <= max_iterations; ++it) {
        const NodeId node = sampler.sample();
        if (auto move = best_strategy(result.partition, node, params)) {
            result.partition.apply_move(*move);
            ++result.switch_count;
            sampler.downweight(node, config.lambda);
            record_trace(result.modularity_trace, it,
                         approx_modularity(result.partition, config.gamma), result.switch_count);
        }
        if (it % window == 0) {
            record_trace(result.modularity_trace, it,
                         approx_modularity(result.partition, config.gamma), result.switch_count);
            // the NMI signal alone can fire while an improving move merely went
            // unsampled; converged additionally means no node wants to move
            if (nmi(std::span<const CommunityLabel>(checkpoint),
                    std::span<const CommunityLabel>(result.partition.labels())) >= config.eta &&
                !any_improving_move(result.partition, params)) {
                result.converged = true;
                result.iterations_used = it;
                break;
            }
            checkpoint = result.partition.labels();
        }
    }
    if (!result.converged) result.iterations_used = max_iterations;
    record_trace(result.modularity_trace, result.iterations_used,
                 approx_modularity(result.partition, config.gamma), result.switch_count);

    if (config.verify_nash && result.converged) {
        result.nash_verified = is_nash_equilibrium(result.partition, params).is_equilibrium;
    }
    return result;
}

TickResult run_payoff_only(const TickSnapshot& snapshot, const Partition* prev_partition,
                   const EngineConfig& config) {
    EngineConfig payoff_only = config;
    payoff_only.lambda = 1.0;
    return run_tick(snapshot, prev_partition, payoff_only);
}

bool terminate_check(const Partition& checkpoint, const Partition& current, double eta) {
    return nmi(checkpoint, current) >= eta;
}

NashReport is_nash_equilibrium(const Partition& partition, const GameParams& params) {
    NashReport report;
    for (NodeId node : partition.graph().nodes) {
        if (best_strategy(partition, node, params)) {
            report.is_equilibrium = false;
            report.violators.push_back(node);
        }
    }
    return report;
}

} // namespace densewatch
