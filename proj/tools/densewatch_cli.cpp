// densewatch command line: run dense-community anomaly detection over an edge
// stream, evaluate against ground truth, benchmark convergence, or inspect
// sketch statistics.

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "densewatch/anomaly.hpp"
#include "densewatch/engine.hpp"
#include "densewatch/hashing.hpp"
#include "densewatch/modularity.hpp"
#include "densewatch/stream.hpp"

namespace dw = densewatch;
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnreadable = 2;
constexpr int kExitNoEvents = 3;
constexpr int kExitNoLabels = 4;

struct CliOptions {
    std::string input;
    std::string out_dir = "densewatch-out";
    double lambda = 0.8;
    double eta = 0.99;
    std::uint32_t k = 10;
    std::uint32_t min_size = 3;
    std::uint32_t cms_width = 719;
    std::uint32_t cms_depth = 2;
    std::uint32_t fi_capacity = 4096;
    double fi_threshold = 0.3;
    std::uint64_t tick_width = 1;
    std::uint64_t seed = 1;
    bool carry_over = false;
    bool accumulate = false;
    std::string retention_variant = "eq6";
    std::string fi_threshold_mode = "mean";
    double gamma = 1.0;
    std::uint32_t max_iters_factor = 50;
    std::uint32_t nmi_window = 0;
    std::uint32_t bench_seeds = 10;
    std::uint32_t jobs = 0; // 0 = hardware concurrency
    std::string dump_state_dir; // sketch-stats: write per-tick snapshot state here

    dw::SnapshotConfig snapshot_config() const {
        dw::SnapshotConfig cfg;
        cfg.cms_width = cms_width;
        cfg.cms_depth = cms_depth;
        cfg.fi_capacity = fi_capacity;
        cfg.seed = seed;
        cfg.fi_mode = fi_threshold_mode == "total" ? dw::FiThresholdMode::FractionOfTotal
                                                   : dw::FiThresholdMode::FractionOfMean;
        return cfg;
    }

    dw::EngineConfig engine_config(std::uint64_t tick) const {
        dw::EngineConfig cfg;
        cfg.lambda = lambda;
        cfg.eta = eta;
        cfg.nmi_window = nmi_window;
        cfg.fi_threshold = fi_threshold;
        cfg.gamma = gamma;
        cfg.retention = retention_variant == "example" ? dw::RetentionVariant::Example
                                                       : dw::RetentionVariant::Eq6;
        cfg.seed = dw::mix64(seed ^ tick);
        cfg.carry_over_partition = carry_over;
        cfg.max_iterations = 0; // resolved per tick from max_iters_factor below
        return cfg;
    }
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("input", opt.input, "edge stream CSV: src,dst,timestamp[,label]")->required();
    cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--lambda", opt.lambda, "community retention rate")->capture_default_str();
    cmd->add_option("--eta", opt.eta, "NMI termination threshold")->capture_default_str();
    cmd->add_option("--k", opt.k, "top-K communities to flag")->capture_default_str();
    cmd->add_option("--min-size", opt.min_size, "minimum community size to rank")->capture_default_str();
    cmd->add_option("--cms-width", opt.cms_width, "count-min sketch width")->capture_default_str();
    cmd->add_option("--cms-depth", opt.cms_depth, "count-min sketch depth")->capture_default_str();
    cmd->add_option("--fi-capacity", opt.fi_capacity, "frequent-items capacity")->capture_default_str();
    cmd->add_option("--fi-threshold", opt.fi_threshold, "frequent-items retrieval threshold")
        ->capture_default_str();
    cmd->add_option("--tick-width", opt.tick_width, "timestamp units per tick bucket")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "PRNG seed")->envname("DENSEWATCH_SEED")->capture_default_str();
    cmd->add_flag("--carry-over", opt.carry_over, "carry partitions across ticks");
    cmd->add_flag("--accumulate-sketches", opt.accumulate,
                  "accumulate sketch state across ticks instead of resetting per tick");
    cmd->add_option("--retention-variant", opt.retention_variant, "eq6 or example")
        ->check(CLI::IsMember({"eq6", "example"}))->capture_default_str();
    cmd->add_option("--fi-threshold-mode", opt.fi_threshold_mode,
                    "interpret the threshold as a fraction of the mean or of the total weight")
        ->check(CLI::IsMember({"mean", "total"}))->capture_default_str();
    cmd->add_option("--gamma", opt.gamma, "resolution parameter")->capture_default_str();
    cmd->add_option("--max-iters-factor", opt.max_iters_factor,
                    "iteration cap as a multiple of the tracked-node count")->capture_default_str();
    cmd->add_option("--nmi-window", opt.nmi_window, "iterations between NMI checks (0 = auto)")
        ->capture_default_str();
    cmd->add_option("--jobs", opt.jobs, "worker threads for independent ticks (0 = auto)")
        ->capture_default_str();
    cmd->set_config("--config", "", "flat key = value config file; flags override it");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string trace_csv(const dw::TickResult& result) {
    std::ostringstream out;
    out << "iteration,modularity,switches\n";
    for (const auto& p : result.modularity_trace) {
        out << p.iteration << ',' << format_double(p.modularity) << ',' << p.switches << '\n';
    }
    return out.str();
}

struct TickOutput {
    std::uint64_t tick = 0;
    std::string report_line;
    std::string trace;
    dw::AnomalyReport report;
    std::vector<dw::EdgeEvent> events;
    std::optional<dw::Partition> partition; ///< terminal partition, feeds carry-over
    std::uint64_t tracked_nodes = 0;
    std::uint64_t switches = 0;
    bool converged = false;
};

/// Game loop and report over a sealed snapshot of one tick batch.
TickOutput analyze_tick(const dw::TickSnapshot& snapshot, const dw::TickBatch& batch,
                        const CliOptions& opt, const dw::Partition* prev) {
    dw::EngineConfig cfg = opt.engine_config(batch.tick);
    const auto tracked = snapshot.tracked_nodes(cfg.fi_threshold);
    cfg.max_iterations = static_cast<std::uint64_t>(opt.max_iters_factor) *
                         std::max<std::uint64_t>(tracked.size(), 1);

    TickOutput out;
    out.tick = batch.tick;
    out.tracked_nodes = tracked.size();

    if (tracked.empty()) {
        out.report_line = ordered_json{{"tick", batch.tick},
                                       {"top", ordered_json::array()},
                                       {"flagged", ordered_json::array()}}.dump();
        out.trace = "iteration,modularity,switches\n";
        return out;
    }

    const dw::TickResult result = dw::run_tick(snapshot, prev, cfg);
    out.switches = result.switch_count;
    out.converged = result.converged;

    out.report.tick = batch.tick;
    out.report.k = opt.k;
    out.report.min_size = opt.min_size;
    out.report.top_communities = dw::dense_communities(result.partition, opt.k, opt.min_size, opt.gamma);

    out.events.reserve(batch.events.size());
    for (const auto& raw : batch.events) out.events.push_back(raw.event);
    out.report.flagged = dw::score_edges(result.partition, out.report.top_communities, out.events);

    ordered_json top = ordered_json::array();
    for (const auto& c : out.report.top_communities) {
        top.push_back(ordered_json{{"label", c.label}, {"q_c", c.q_c}, {"size", c.size}});
    }
    ordered_json flagged = ordered_json::array();
    for (const auto& f : out.report.flagged) {
        const auto& raw = batch.events[f.event_index];
        flagged.push_back(ordered_json{{"src", raw.src_label}, {"dst", raw.dst_label}, {"score", f.score}});
    }
    out.report_line = ordered_json{{"tick", batch.tick}, {"top", top}, {"flagged", flagged}}.dump();
    out.trace = trace_csv(result);
    out.partition = result.partition;
    return out;
}

/// Snapshot -> game -> report for one tick batch (per-tick sketch reset).
TickOutput process_tick(const dw::TickBatch& batch, const CliOptions& opt,
                        const dw::Partition* prev) {
    dw::SnapshotBuilder builder(batch.tick, opt.snapshot_config());
    for (const auto& raw : batch.events) builder.ingest(raw.event);
    return analyze_tick(builder.seal(), batch, opt, prev);
}

struct RunTotals {
    std::uint64_t ticks = 0;
    std::uint64_t events = 0;
    std::uint64_t flagged = 0;
    std::uint64_t converged_ticks = 0;
};

int run_pipeline(const CliOptions& opt, bool evaluate_labels) {
    std::ifstream in(opt.input);
    if (!in) {
        std::cerr << "error: cannot read " << opt.input << "\n";
        return kExitUnreadable;
    }
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream reports(std::filesystem::path(opt.out_dir) / "reports.jsonl",
                          std::ios::trunc);

    dw::EdgeStreamReader reader(in, opt.tick_width);
    RunTotals totals;
    std::vector<TickOutput> kept; // retained for evaluation when labels matter

    auto write_output = [&](TickOutput&& out) {
        reports << out.report_line << '\n';
        std::ofstream trace(std::filesystem::path(opt.out_dir) /
                            ("trace_tick_" + std::to_string(out.tick) + ".csv"), std::ios::trunc);
        trace << out.trace;
        ++totals.ticks;
        totals.flagged += out.report.flagged.size();
        if (out.converged) ++totals.converged_ticks;
        if (evaluate_labels) {
            out.partition.reset();
            kept.push_back(std::move(out));
        }
    };

    if (opt.carry_over || opt.accumulate) {
        // sketch accumulation and partition carry-over both chain tick state,
        // so these modes process ticks sequentially
        std::optional<dw::Partition> prev;
        std::optional<dw::SnapshotBuilder> accumulator;
        while (auto batch = reader.next()) {
            totals.events += batch->events.size();
            TickOutput out = [&] {
                if (!opt.accumulate) {
                    return process_tick(*batch, opt, prev ? &*prev : nullptr);
                }
                if (!accumulator) {
                    accumulator.emplace(batch->tick, opt.snapshot_config());
                } else {
                    accumulator->advance_tick(batch->tick);
                }
                for (const auto& raw : batch->events) accumulator->ingest(raw.event);
                return analyze_tick(accumulator->seal_copy(), *batch, opt,
                                    prev ? &*prev : nullptr);
            }();
            if (opt.carry_over && out.partition) prev = std::move(out.partition);
            write_output(std::move(out));
        }
    } else {
        const std::uint32_t workers = opt.jobs != 0
            ? opt.jobs
            : std::max(1u, std::thread::hardware_concurrency());
        std::deque<std::future<TickOutput>> pending;
        auto drain_one = [&]() {
            write_output(pending.front().get());
            pending.pop_front();
        };
        while (auto batch = reader.next()) {
            totals.events += batch->events.size();
            pending.push_back(std::async(std::launch::async,
                                         [b = std::move(*batch), &opt]() {
                                             return process_tick(b, opt, nullptr);
                                         }));
            while (pending.size() >= workers) drain_one();
        }
        while (!pending.empty()) drain_one();
    }

    const auto& stats = reader.stats();
    if (stats.parsed == 0) {
        std::cerr << "error: no parseable events in " << opt.input << "\n";
        return kExitNoEvents;
    }

    if (evaluate_labels) {
        if (!stats.all_labeled || !stats.any_label) {
            std::cerr << "error: eval requires a 0/1 label on every event\n";
            return kExitNoLabels;
        }
        std::vector<dw::LabeledTick> labeled;
        labeled.reserve(kept.size());
        for (const auto& out : kept) labeled.push_back({&out.report, out.events});
        const dw::EvaluationSummary summary = dw::evaluate(labeled);

        ordered_json ev{{"ticks", totals.ticks},
                        {"flagged_count", summary.flagged_count},
                        {"true_positive_count", summary.true_positive_count},
                        {"anomalous_event_count", summary.anomalous_event_count}};
        ev["mean_precision"] = summary.mean_precision
            ? ordered_json(*summary.mean_precision) : ordered_json(nullptr);
        ev["recall"] = summary.recall ? ordered_json(*summary.recall) : ordered_json(nullptr);
        ev["per_tick_precision"] = summary.per_tick_precision;
        std::ofstream evfile(std::filesystem::path(opt.out_dir) / "evaluation.json", std::ios::trunc);
        evfile << ev.dump(2) << '\n';

        if (summary.mean_precision) {
            std::cout << "mean_precision=" << format_double(*summary.mean_precision) << "\n";
        } else {
            std::cout << "mean_precision=n/a (no flags)\n";
        }
    }

    std::cout << "ticks=" << totals.ticks << " events=" << totals.events
              << " malformed=" << stats.malformed << " late=" << stats.late
              << " flagged=" << totals.flagged
              << " converged_ticks=" << totals.converged_ticks << "\n";
    return kExitOk;
}

int run_bench(const CliOptions& opt) {
    std::ifstream in(opt.input);
    if (!in) {
        std::cerr << "error: cannot read " << opt.input << "\n";
        return kExitUnreadable;
    }
    std::filesystem::create_directories(opt.out_dir);

    dw::EdgeStreamReader reader(in, opt.tick_width);
    std::vector<dw::TickBatch> batches;
    while (auto batch = reader.next()) batches.push_back(std::move(*batch));
    if (reader.stats().parsed == 0) {
        std::cerr << "error: no parseable events in " << opt.input << "\n";
        return kExitNoEvents;
    }

    struct ModeStats {
        std::vector<std::uint64_t> iterations;
        double mean() const {
            if (iterations.empty()) return 0.0;
            double s = 0.0;
            for (auto v : iterations) s += static_cast<double>(v);
            return s / static_cast<double>(iterations.size());
        }
    };
    ModeStats retention, payoff_only;

    for (const auto& batch : batches) {
        dw::SnapshotBuilder builder(batch.tick, opt.snapshot_config());
        for (const auto& raw : batch.events) builder.ingest(raw.event);
        const dw::TickSnapshot snapshot = builder.seal();
        const auto tracked = snapshot.tracked_nodes(opt.fi_threshold);
        if (tracked.empty()) continue;

        for (std::uint32_t s = 0; s < opt.bench_seeds; ++s) {
            dw::EngineConfig cfg = opt.engine_config(batch.tick);
            cfg.seed = dw::mix64(opt.seed ^ batch.tick ^ (0x5eedULL + s));
            cfg.max_iterations = static_cast<std::uint64_t>(opt.max_iters_factor) * tracked.size();

            const dw::TickResult t = dw::run_tick(snapshot, nullptr, cfg);
            const dw::TickResult g = dw::run_payoff_only(snapshot, nullptr, cfg);
            retention.iterations.push_back(t.iterations_used);
            payoff_only.iterations.push_back(g.iterations_used);

            if (s == 0) {
                std::ofstream tf(std::filesystem::path(opt.out_dir) /
                                 ("trace_tick_" + std::to_string(batch.tick) + "_retention.csv"));
                tf << trace_csv(t);
                std::ofstream gf(std::filesystem::path(opt.out_dir) /
                                 ("trace_tick_" + std::to_string(batch.tick) + "_payoff_only.csv"));
                gf << trace_csv(g);
            }
        }
    }

    ordered_json summary{
        {"ticks", batches.size()},
        {"seeds", opt.bench_seeds},
        {"retention", {{"lambda", opt.lambda}, {"mean_iterations", retention.mean()}, {"iterations", retention.iterations}}},
        {"payoff_only", {{"lambda", 1.0}, {"mean_iterations", payoff_only.mean()}, {"iterations", payoff_only.iterations}}},
    };
    std::ofstream sf(std::filesystem::path(opt.out_dir) / "bench_summary.json", std::ios::trunc);
    sf << summary.dump(2) << '\n';
    std::cout << "retention_mean_iterations=" << format_double(retention.mean())
              << " payoff_only_mean_iterations=" << format_double(payoff_only.mean()) << "\n";
    return kExitOk;
}

ordered_json stats_line(const dw::TickSnapshot& snap, double fi_threshold,
                        std::uint32_t cms_width) {
    const auto bound = dw::modularity_error_bound(snap, snap.edge_cms().epsilon(), 0.0);
    return ordered_json{
        {"tick", snap.tick()},
        {"edge_total_mass", snap.edge_cms().total_mass()},
        {"degree_total_mass", snap.degree_cms().total_mass()},
        {"distinct_edge_estimate", snap.distinct_edge_estimate()},
        {"edge_fill_ratio", snap.edge_cms().fill_ratio()},
        {"degree_fill_ratio", snap.degree_cms().fill_ratio()},
        {"avg_bucket_load", static_cast<double>(snap.edge_cms().total_mass()) /
                                static_cast<double>(cms_width)},
        {"fi_entries", snap.node_sketch().size()},
        {"fi_capacity", snap.node_sketch().capacity()},
        {"tracked_nodes", snap.tracked_nodes(fi_threshold).size()},
        {"dropped_pairs", snap.dropped_pairs()},
        {"error_bound", bound.value},
    };
}

bool is_snapshot_state_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[5] = {};
    in.read(magic, sizeof(magic));
    return in && std::string_view(magic, 5) == "DWSN1";
}

int run_sketch_stats(const CliOptions& opt) {
    // the input can also be a previously dumped snapshot state file
    if (is_snapshot_state_file(opt.input)) {
        std::ifstream in(opt.input, std::ios::binary);
        const dw::TickSnapshot snap = dw::TickSnapshot::deserialize(in);
        std::cout << stats_line(snap, opt.fi_threshold, snap.edge_cms().width()).dump() << "\n";
        return kExitOk;
    }

    std::ifstream in(opt.input);
    if (!in) {
        std::cerr << "error: cannot read " << opt.input << "\n";
        return kExitUnreadable;
    }
    if (!opt.dump_state_dir.empty()) fs::create_directories(opt.dump_state_dir);

    dw::EdgeStreamReader reader(in, opt.tick_width);
    std::uint64_t ticks = 0;
    std::uint64_t events = 0;
    std::optional<dw::SnapshotBuilder> accumulator;
    while (auto batch = reader.next()) {
        if (!opt.accumulate || !accumulator) {
            accumulator.emplace(batch->tick, opt.snapshot_config());
        } else {
            accumulator->advance_tick(batch->tick);
        }
        for (const auto& raw : batch->events) accumulator->ingest(raw.event);
        const dw::TickSnapshot snap = accumulator->seal_copy();
        ordered_json line = stats_line(snap, opt.fi_threshold, opt.cms_width);
        line["events"] = batch->events.size();
        std::cout << line.dump() << "\n";
        if (!opt.dump_state_dir.empty()) {
            std::ofstream state(fs::path(opt.dump_state_dir) /
                                    ("state_tick_" + std::to_string(snap.tick()) + ".dwsn"),
                                std::ios::binary | std::ios::trunc);
            snap.serialize(state);
        }
        ++ticks;
        events += batch->events.size();
    }
    std::cout << ordered_json{{"ticks", ticks},
                              {"events", events},
                              {"malformed", reader.stats().malformed}}.dump()
              << "\n";
    if (reader.stats().parsed == 0) {
        std::cerr << "error: no parseable events in " << opt.input << "\n";
        return kExitNoEvents;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dense-subcommunity anomaly detection over timestamped edge streams"};
    app.require_subcommand(1);

    CliOptions run_opt, eval_opt, bench_opt, stats_opt;
    CLI::App* cmd_run = app.add_subcommand("run", "detect dense communities per tick");
    add_common_options(cmd_run, run_opt);
    CLI::App* cmd_eval = app.add_subcommand("eval", "run and score flags against labels");
    add_common_options(cmd_eval, eval_opt);
    CLI::App* cmd_bench = app.add_subcommand("bench", "paired convergence traces: retention on vs off");
    add_common_options(cmd_bench, bench_opt);
    cmd_bench->add_option("--bench-seeds", bench_opt.bench_seeds, "seeds per tick per mode")
        ->capture_default_str();
    CLI::App* cmd_stats = app.add_subcommand(
        "sketch-stats", "per-tick sketch fill and bound report; also inspects dumped state files");
    add_common_options(cmd_stats, stats_opt);
    cmd_stats->add_option("--dump-state", stats_opt.dump_state_dir,
                          "write each tick's snapshot state (binary) into this directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) return run_pipeline(run_opt, false);
        if (cmd_eval->parsed()) return run_pipeline(eval_opt, true);
        if (cmd_bench->parsed()) return run_bench(bench_opt);
        if (cmd_stats->parsed()) return run_sketch_stats(stats_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
