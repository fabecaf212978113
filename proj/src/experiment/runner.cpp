#include "gridsim/experiment/runner.hpp"

#include <algorithm>
#include <fstream>
#include <spdlog/spdlog.h>

#include "gridsim/error.hpp"
#include "gridsim/experiment/report.hpp"
#include "gridsim/rng.hpp"
#include "gridsim/runtime/grid_runtime.hpp"

namespace gridsim::experiment {

namespace fs = std::filesystem;

RunInputs make_inputs(const ExperimentConfig& config, std::uint64_t seed, int node_count) {
    RunInputs in;
    model::PlatformSpec spec = config.platform;
    spec.node_count = node_count;
    spec.rng_seed = substream(seed ^ config.platform.rng_seed, "platform");
    in.topology = model::generate_platform(spec);
    in.jobs = model::generate_workload(config.workload.job_class, config.workload.count,
                                       config.workload.submit_policy, substream(seed, "workload"), node_count);
    if (config.failures.schedule) {
        in.failures = *config.failures.schedule;
    } else if (config.failures.generator) {
        in.failures = sim::generate_failures(*config.failures.generator, node_count, substream(seed, "failures"));
    }
    return in;
}

RunResult run_single(const ExperimentConfig& config, broker::PolicyKind policy, std::uint64_t seed, int node_count,
                     std::ostream* trace_sink) {
    RunInputs in = make_inputs(config, seed, node_count);
    runtime::GridRuntime rt(in.topology, runtime_config(config, policy, seed));
    if (trace_sink) rt.simulator().trace().set_sink(trace_sink);
    rt.submit(in.jobs);
    rt.apply(in.failures);
    const auto& trace = rt.run();

    RunResult r;
    r.policy = policy;
    r.seed = seed;
    r.node_count = node_count;
    r.records = rt.job_records();
    r.events = trace.size();
    r.messages_intra = trace.messages(sim::Tier::Intra);
    r.messages_region = trace.messages(sim::Tier::Region);
    r.messages_inter = trace.messages(sim::Tier::Inter);
    return r;
}

namespace {

std::vector<broker::PolicyKind> canonical_policies(const ExperimentConfig& config) {
    auto policies = config.policies;
    std::sort(policies.begin(), policies.end(),
              [](auto a, auto b) { return broker::to_string(a) < broker::to_string(b); });
    return policies;
}

std::vector<std::uint64_t> canonical_seeds(const ExperimentConfig& config) {
    auto seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    return seeds;
}

std::string run_label(const RunResult& r, bool sweep) {
    std::string label = std::string(broker::to_string(r.policy)) + "_" + std::to_string(r.seed);
    if (sweep) label += "_n" + std::to_string(r.node_count);
    return label;
}

}  // namespace

std::vector<RunResult> run_all(const ExperimentConfig& config, const std::function<void(const RunResult&)>& on_run) {
    std::vector<RunResult> out;
    auto sweep = config.sweep();
    std::sort(sweep.begin(), sweep.end());
    for (int n : sweep) {
        for (auto policy : canonical_policies(config)) {
            for (auto seed : canonical_seeds(config)) {
                out.push_back(run_single(config, policy, seed, n));
                if (on_run) on_run(out.back());
            }
        }
    }
    return out;
}

void ensure_writable(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw GridError("output path " + dir.string() + " is not a writable directory");
    const fs::path probe = dir / ".gridsim_write_probe";
    {
        std::ofstream f(probe);
        if (!f || !(f << "x")) throw GridError("output path " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
    ensure_writable(out_dir);
    auto sweep = config.sweep();
    std::sort(sweep.begin(), sweep.end());
    const bool is_sweep = sweep.size() > 1;
    if (config.write_traces) ensure_writable(out_dir / "traces");

    std::vector<RunResult> results;
    std::vector<SummaryRow> summary;
    const std::string cls(model::to_string(config.workload.job_class));
    for (int n : sweep) {
        const fs::path csv_path = out_dir / (is_sweep ? "jobs_n" + std::to_string(n) + ".csv" : std::string("jobs.csv"));
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw GridError("cannot write " + csv_path.string());
        write_csv_header(csv);
        for (auto policy : canonical_policies(config)) {
            for (auto seed : canonical_seeds(config)) {
                RunResult r;
                if (config.write_traces) {
                    RunResult probe{policy, seed, n, {}, 0, 0, 0, 0};
                    const fs::path trace_path = out_dir / "traces" / (run_label(probe, is_sweep) + ".jsonl");
                    std::ofstream trace(trace_path, std::ios::binary);
                    if (!trace) throw GridError("cannot write " + trace_path.string());
                    r = run_single(config, policy, seed, n, &trace);
                } else {
                    r = run_single(config, policy, seed, n);
                }
                write_csv_rows(csv, r.records, seed);
                summary.push_back(summarize(r.records, broker::to_string(policy), cls, seed, n));
                spdlog::info("{} n={} seed={}: mean {:.3f}s, {} completed, {} events", broker::to_string(policy), n,
                             seed, summary.back().mean, summary.back().completed, r.events);
                results.push_back(std::move(r));
            }
        }
    }

    std::ofstream sj(out_dir / "summary.json", std::ios::binary);
    sj << to_json(summary).dump(2) << '\n';
    if (config.policies.size() >= 2) {
        std::ofstream plot(out_dir / "plot.csv", std::ios::binary);
        plot << compare_policies(summary).plot_csv;
    }
    return results;
}

}  // namespace gridsim::experiment
