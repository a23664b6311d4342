// Acceptance suite: one check per shipped guarantee, each printed as a
// single pass/fail line with the measured numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "densewatch/anomaly.hpp"
#include "densewatch/count_min_sketch.hpp"
#include "densewatch/engine.hpp"
#include "densewatch/game.hpp"
#include "densewatch/hashing.hpp"
#include "densewatch/modularity.hpp"
#include "densewatch/oracle.hpp"
#include "densewatch/stream.hpp"
#include "support/fixtures.hpp"

using namespace densewatch;
namespace fx = densewatch::testing;
namespace fs = std::filesystem;

namespace {

std::string g_cli; // path to the densewatch binary, for the CLI-level checks

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

EngineConfig exact_engine(std::uint64_t seed, double lambda = 1.0) {
    EngineConfig cfg;
    cfg.lambda = lambda;
    cfg.fi_threshold = 0.0;
    cfg.seed = seed;
    return cfg;
}

// 1. Count-min bound: overestimation always; a-hat <= a + (e/719) V for at
//    least 98% of keys in each of 1,000 seeded 10^4-event streams; < 60 s.
Outcome sketch_bound_conformance() {
    const auto start = std::chrono::steady_clock::now();
    constexpr int kStreams = 1000;
    constexpr std::uint64_t kEvents = 10000;
    const double eps = std::exp(1.0) / 719.0;

    double worst_fraction = 1.0;
    for (int stream = 0; stream < kStreams; ++stream) {
        CountMinSketch sketch(719, 2, static_cast<std::uint64_t>(stream) * 7919 + 1);
        SplitMix64 rng(mix64(stream + 17));
        const std::uint64_t domain = 1000 + rng.next_below(2000);
        std::unordered_map<std::uint64_t, std::uint64_t> exact;
        exact.reserve(domain);
        for (std::uint64_t i = 0; i < kEvents; ++i) {
            const std::uint64_t key = rng.next_below(domain);
            sketch.update(key, 1);
            exact[key] += 1;
        }
        const double cap = eps * static_cast<double>(sketch.total_mass());
        std::uint64_t within = 0;
        for (const auto& [key, truth] : exact) {
            const std::uint64_t est = sketch.query(key);
            if (est < truth) {
                return {false, fmt("underestimate in stream %d", stream)};
            }
            if (static_cast<double>(est - truth) <= cap) ++within;
        }
        const double fraction = static_cast<double>(within) / static_cast<double>(exact.size());
        worst_fraction = std::min(worst_fraction, fraction);
        if (fraction < 0.98) {
            return {false, fmt("stream %d within-bound fraction %.4f < 0.98", stream, fraction)};
        }
    }
    const double elapsed = seconds_since(start);
    return {elapsed < 60.0,
            fmt("1000 streams, overestimation 100%%, worst within-bound fraction %.4f, %.1f s",
                worst_fraction, elapsed)};
}

// 2. Approximate modularity never exceeds exact plus the additive slack on
//    200 random graphs with random partitions; < 120 s.
Outcome appendix_bound() {
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        SplitMix64 rng(mix64(trial + 1000));
        const auto n = static_cast<std::uint32_t>(50 + rng.next_below(451));
        const auto edges = static_cast<std::uint32_t>(200 + rng.next_below(4801));
        const auto events = fx::random_graph_events(n, edges, trial + 31);

        SnapshotConfig cfg;
        cfg.seed = trial + 5;
        const TickSnapshot snap = fx::build_snapshot(events, cfg);
        const ExactGraph exact = exact_replay(events);

        auto graph = std::make_shared<const TrackedGraph>(TrackedGraph::from_snapshot(snap, 0.0));
        std::vector<CommunityLabel> labels(graph->size());
        const std::uint32_t groups = 1 + static_cast<std::uint32_t>(rng.next_below(10));
        for (auto& l : labels) l = static_cast<CommunityLabel>(rng.next_below(groups));
        const Partition partition = Partition::from_labels(graph, labels);

        const auto cmp = compare_modularity(exact, snap, partition, 0.0);
        if (!cmp.bound_satisfied) {
            return {false, fmt("trial %d: approx %.6f > exact %.6f + bound %.6f", trial,
                               cmp.approx_q, cmp.exact_q, cmp.bound)};
        }
    }
    const double elapsed = seconds_since(start);
    return {elapsed < 120.0, fmt("200/200 trials within the bound, %.1f s", elapsed)};
}

// 3. Mean relative modularity error <= 2% over a 50-tick synthetic stream at
//    the reported sketch configuration (w=719, d=2, capacity 4096).
Outcome approximation_quality() {
    double total_rel = 0.0;
    double worst = 0.0;
    std::size_t max_tracked = 0;
    for (std::uint64_t tick = 0; tick < 50; ++tick) {
        const auto events = fx::approx_quality_tick(tick, 4242);
        SnapshotConfig cfg; // default dimensions
        cfg.seed = 97;
        const TickSnapshot snap = fx::build_snapshot(events, cfg, tick);

        EngineConfig ecfg;
        ecfg.lambda = 0.8;
        ecfg.fi_threshold = 0.3;
        ecfg.seed = mix64(7 ^ tick);
        const TickResult result = run_tick(snap, nullptr, ecfg);
        max_tracked = std::max(max_tracked, static_cast<std::size_t>(result.partition.size()));

        const auto cmp = compare_modularity(exact_replay(events), snap, result.partition, 0.0);
        total_rel += cmp.relative_error;
        worst = std::max(worst, cmp.relative_error);
    }
    const double mean_rel = total_rel / 50.0;
    return {mean_rel <= 0.02 && max_tracked <= 2000,
            fmt("mean relative error %.4f%% (worst %.4f%%), tracked <= %zu", 100.0 * mean_rel,
                100.0 * worst, max_tracked)};
}

// 4. Converged lambda=1 runs are Nash equilibria on every fixture; payoff
//    symmetry and additive separability hold to 1e-9 over 1,000 triples each.
Outcome nash_property() {
    const auto fixtures = fx::small_fixture_suite();
    int converged_runs = 0;
    for (const auto& fixture : fixtures) {
        const auto events = fx::events_from_pairs(fixture.edges);
        const TickSnapshot snap = fx::exact_snapshot(events);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const TickResult result = run_tick(snap, nullptr, exact_engine(seed * 13 + 1));
            if (!result.converged) continue;
            ++converged_runs;
            const auto report = is_nash_equilibrium(result.partition, GameParams{1.0});
            if (!report.is_equilibrium) {
                return {false, fmt("%s seed %llu: %zu violators after convergence",
                                   fixture.name.c_str(), static_cast<unsigned long long>(seed),
                                   report.violators.size())};
            }
        }
    }

    SplitMix64 rng(424242);
    double worst_sym = 0.0;
    double worst_sep = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto& fixture = fixtures[rng.next_below(fixtures.size())];
        const auto events = fx::events_from_pairs(fixture.edges);
        const TickSnapshot snap = fx::exact_snapshot(events);
        auto graph = std::make_shared<const TrackedGraph>(TrackedGraph::from_snapshot(snap, 0.0));
        std::vector<CommunityLabel> labels(graph->size());
        const std::uint32_t groups = 1 + static_cast<std::uint32_t>(rng.next_below(4));
        for (auto& l : labels) l = static_cast<CommunityLabel>(rng.next_below(groups));
        const Partition p = Partition::from_labels(graph, labels);

        const NodeId u = graph->nodes[rng.next_below(graph->size())];
        const NodeId v = graph->nodes[rng.next_below(graph->size())];
        const auto c = static_cast<CommunityLabel>(rng.next_below(groups));
        worst_sym = std::max(worst_sym,
                             std::abs(pairwise_payoff(p, u, v, c) - pairwise_payoff(p, v, u, c)));
        if (p.has_community(c)) {
            double sum = 0.0;
            for (std::uint32_t slot : p.community(c).members)
                sum += pairwise_payoff(p, u, p.graph().nodes[slot], c);
            worst_sep = std::max(worst_sep, std::abs(marginal_payoff(p, u, c) - sum));
        }
    }
    const bool pass = worst_sym <= 1e-9 && worst_sep <= 1e-9;
    return {pass, fmt("%d converged runs all Nash; symmetry residual %.2e, separability residual %.2e",
                      converged_runs, worst_sym, worst_sep)};
}

// 5. Converged engine runs achieve at least 0.9 of the brute-force optimum in
//    18 of 20 seeds on every fixture with at most 8 nodes.
Outcome engine_vs_brute_force() {
    std::string weakest = "-";
    int weakest_hits = 20;
    for (const auto& fixture : fx::small_fixture_suite()) {
        const auto events = fx::events_from_pairs(fixture.edges);
        const ExactGraph exact = exact_replay(events);
        if (exact.node_count() > 8) {
            return {false, fmt("fixture %s has more than 8 nodes", fixture.name.c_str())};
        }
        const auto best = brute_force_best_partition(exact);
        const TickSnapshot snap = fx::exact_snapshot(events);

        int hits = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const TickResult result = run_tick(snap, nullptr, exact_engine(seed));
            if (!result.converged) continue;
            if (approx_modularity(result.partition) + 1e-9 >= 0.9 * best.q) ++hits;
        }
        if (hits < weakest_hits) {
            weakest_hits = hits;
            weakest = fixture.name;
        }
        if (hits < 18) {
            return {false, fmt("fixture %s: only %d/20 seeds reached 0.9 Q*",
                               fixture.name.c_str(), hits)};
        }
    }
    return {true, fmt("all fixtures >= 18/20 seeds at 0.9 Q* (weakest: %s, %d/20)",
                      weakest.c_str(), weakest_hits)};
}

// 6. The worked demonstration: uniform 1/14 sampling, the downweighted
//    0.8/13.8 probability, and both retention readings on its fixture.
Outcome worked_example() {
    std::vector<NodeId> nodes;
    for (NodeId i = 1; i <= 14; ++i) nodes.push_back(i);
    auto dist = SamplingDistribution::uniform(nodes, 1);
    for (NodeId i = 1; i <= 14; ++i) {
        if (std::abs(dist.probability(i) - 1.0 / 14.0) > 1e-12) {
            return {false, "uniform probability is not 1/14"};
        }
    }
    dist.downweight(5, 0.8);
    const double p = dist.probability(5);
    if (std::abs(p - 0.8 / 13.8) > 1e-12 || std::abs(p - 0.0580) > 1e-4 || !(p < 1.0 / 14.0)) {
        return {false, fmt("downweighted probability %.6f off target", p)};
    }

    const auto ex = fx::retention_example();
    const TickSnapshot snap = fx::exact_snapshot(ex.events);
    if (snap.edge_mass() != 13) return {false, "fixture edge mass is not 13"};

    auto graph = std::make_shared<const TrackedGraph>(TrackedGraph::from_snapshot(snap, 0.0));
    std::vector<CommunityLabel> labels(graph->size());
    CommunityLabel next = 2;
    for (std::uint32_t s = 0; s < graph->size(); ++s) {
        const NodeId n = graph->nodes[s];
        if (n <= 3) labels[s] = 0;
        else if (n <= 6) labels[s] = 1;
        else labels[s] = next++;
    }
    const Partition partition = Partition::from_labels(graph, labels);

    const double eq6_c1 = community_retention(partition, 0, RetentionVariant::Eq6);
    const double ex_c1 = community_retention(partition, 0, RetentionVariant::Example);
    const double ex_c2 = community_retention(partition, 1, RetentionVariant::Example);
    const bool pass = std::abs(eq6_c1 - 5.808) <= 1e-3 && std::abs(ex_c1 - 5.42) <= 0.01 &&
                      std::abs(ex_c2 - 3.76) <= 0.01;
    return {pass, fmt("P=1/14, downweighted %.5f; retention eq6 %.4f, example %.4f / %.4f", p,
                      eq6_c1, ex_c1, ex_c2)};
}

// 7. Retention-on converges at least as fast as retention-off (within 10%)
//    on the planted-community benchmark, averaged over 20 seeds.
Outcome convergence_comparison() {
    fx::PlantedConfig pc;
    pc.blocks = 4;
    pc.nodes_per_block = 50;
    pc.intra_pairs_per_block = 150;
    pc.intra_multiplicity = 3;
    pc.inter_pairs = 20;
    const auto events = fx::planted_block_events(pc, 2025);
    const TickSnapshot snap = fx::exact_snapshot(events, 3);

    double tempered_total = 0.0;
    double pure_total = 0.0;
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EngineConfig cfg = exact_engine(seed * 11 + 5, 0.8);
        const TickResult tempered = run_tick(snap, nullptr, cfg);
        const TickResult pure = run_payoff_only(snap, nullptr, cfg);
        tempered_total += static_cast<double>(tempered.iterations_used);
        pure_total += static_cast<double>(pure.iterations_used);
        if (tempered.converged && pure.converged) ++converged;
    }
    const double tempered_mean = tempered_total / 20.0;
    const double pure_mean = pure_total / 20.0;
    const bool pass = converged == 20 && tempered_mean <= 1.1 * pure_mean;
    return {pass, fmt("mean iterations: retention-on %.1f vs retention-off %.1f (%d/20 converged)",
                      tempered_mean, pure_mean, converged)};
}

// 8. End-to-end detection precision >= 0.9 on the planted-anomaly stream,
//    evaluated through the command line with K = 10.
Outcome anomaly_detection() {
    if (g_cli.empty()) return {false, "no --cli path provided"};
    const fs::path work = fs::temp_directory_path() / "densewatch_acceptance_c8";
    fs::remove_all(work);
    fs::create_directories(work);
    {
        std::ofstream out(work / "stream.csv");
        out << fx::planted_anomaly_csv(20, 5);
    }
    const int rc = run_cli("eval " + (work / "stream.csv").string() + " --out " +
                           (work / "out").string() + " --k 10 --seed 11");
    if (rc != 0) return {false, fmt("cmd_eval exited %d", rc)};

    const auto summary = nlohmann::json::parse(slurp(work / "out" / "evaluation.json"));
    if (summary["mean_precision"].is_null()) return {false, "no flags were produced"};
    const double precision = summary["mean_precision"].get<double>();
    const double recall = summary["recall"].is_null() ? 0.0 : summary["recall"].get<double>();
    return {precision >= 0.9,
            fmt("mean precision %.4f over 20 ticks (recall %.4f)", precision, recall)};
}

// 9. On the bundled 34-node classic graph, converged lambda=1 runs land in
//    Q in [0.35, 0.42] for at least 15 of 20 seeds.
Outcome classic_graph_quality() {
    const auto events = fx::events_from_pairs(fx::karate_club());
    const TickSnapshot snap = fx::exact_snapshot(events);
    const ExactGraph exact = exact_replay(events);

    int in_range = 0;
    double best_q = -1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const TickResult result = run_tick(snap, nullptr, exact_engine(seed));
        if (!result.converged) continue;
        std::map<NodeId, CommunityLabel> labels;
        for (std::uint32_t s = 0; s < result.partition.size(); ++s) {
            labels[result.partition.graph().nodes[s]] = result.partition.labels()[s];
        }
        const double q = exact_modularity(exact, labels);
        best_q = std::max(best_q, q);
        if (q >= 0.35 && q <= 0.42) ++in_range;
    }
    return {in_range >= 15, fmt("%d/20 seeds in [0.35, 0.42], best Q %.4f", in_range, best_q)};
}

// 10. Identical flags and seed give byte-identical report and trace files.
Outcome cli_determinism() {
    if (g_cli.empty()) return {false, "no --cli path provided"};
    const fs::path work = fs::temp_directory_path() / "densewatch_acceptance_c10";
    fs::remove_all(work);
    fs::create_directories(work);
    {
        std::ofstream out(work / "stream.csv");
        out << fx::planted_anomaly_csv(5, 9);
    }
    const std::string common = " --k 10 --seed 77";
    if (run_cli("run " + (work / "stream.csv").string() + " --out " + (work / "a").string() +
                common) != 0) {
        return {false, "first run failed"};
    }
    if (run_cli("run " + (work / "stream.csv").string() + " --out " + (work / "b").string() +
                common) != 0) {
        return {false, "second run failed"};
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(work / "a")) {
        const auto name = entry.path().filename();
        if (slurp(entry.path()) != slurp(work / "b" / name)) {
            return {false, "output file " + name.string() + " differs between runs"};
        }
        ++compared;
    }
    return {compared >= 2, fmt("%zu output files byte-identical", compared)};
}

// 11. Snapshot state size is independent of the stream: a million-event tick
//     serializes to exactly as many bytes as a thousand-event tick.
Outcome constant_space() {
    SnapshotConfig cfg; // w=719, d=2, capacity 4096
    cfg.seed = 3;

    const auto small_events = fx::random_graph_events(200, 1000, 1);
    const TickSnapshot small = fx::build_snapshot(small_events, cfg);

    SnapshotBuilder big_builder(0, cfg);
    SplitMix64 rng(8);
    for (std::uint64_t i = 0; i < 1000000; ++i) {
        const NodeId u = 1 + rng.next_below(6000);
        NodeId v = 1 + rng.next_below(6000);
        if (v == u) v = 1 + (v % 6000);
        big_builder.ingest({u, v, 0, std::nullopt});
    }
    const TickSnapshot big = big_builder.seal();

    std::ostringstream ss, sb;
    small.serialize(ss);
    big.serialize(sb);
    const auto a = ss.str().size();
    const auto b = sb.str().size();
    const double drift = std::abs(static_cast<double>(a) - static_cast<double>(b)) /
                         static_cast<double>(std::max(a, b));
    return {a == b && drift <= 0.001,
            fmt("10^3-event tick: %zu bytes, 10^6-event tick: %zu bytes", a, b)};
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"sketch bound conformance", sketch_bound_conformance},
        {"appendix modularity bound", appendix_bound},
        {"approximation quality", approximation_quality},
        {"nash and payoff properties", nash_property},
        {"engine vs brute force", engine_vs_brute_force},
        {"worked example", worked_example},
        {"convergence comparison", convergence_comparison},
        {"anomaly detection precision", anomaly_detection},
        {"classic graph quality", classic_graph_quality},
        {"cli determinism", cli_determinism},
        {"constant space", constant_space},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] criterion %zu (%s): %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0) {
        std::printf("ALL 11 ACCEPTANCE CRITERIA PASSED\n");
    } else {
        std::printf("%d ACCEPTANCE CRITERIA FAILED\n", failures);
    }
    return failures;
}
