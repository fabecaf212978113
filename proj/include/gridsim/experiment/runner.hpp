#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "gridsim/experiment/config.hpp"
#include "gridsim/sim/job_record.hpp"

namespace gridsim::experiment {

struct RunResult {
    broker::PolicyKind policy = broker::PolicyKind::Ncda;
    std::uint64_t seed = 0;
    int node_count = 0;
    std::vector<sim::JobRecord> records;  // sorted by job id
    std::uint64_t events = 0;
    std::uint64_t messages_intra = 0;     // every message, not only job-attributed ones
    std::uint64_t messages_region = 0;
    std::uint64_t messages_inter = 0;
};

/// Everything a run draws from randomness, derived from the seed alone.
struct RunInputs {
    model::GridTopology topology;
    std::vector<model::Job> jobs;
    sim::FailureSchedule failures;
};

RunInputs make_inputs(const ExperimentConfig& config, std::uint64_t seed, int node_count);

/// One simulation. If `trace_sink` is set every processed event is streamed
/// to it as a JSON line.
RunResult run_single(const ExperimentConfig& config, broker::PolicyKind policy, std::uint64_t seed,
                     int node_count, std::ostream* trace_sink = nullptr);

/// All (node count, policy, seed) runs in canonical order: node count, then
/// policy name, then seed.
std::vector<RunResult> run_all(const ExperimentConfig& config,
                               const std::function<void(const RunResult&)>& on_run = {});

/// Throws GridError if `dir` cannot be created or written to.
void ensure_writable(const std::filesystem::path& dir);

/// Full experiment: checks the output directory first, runs everything and
/// writes jobs.csv, summary.json and plot.csv (plus traces/ if enabled).
/// With a node-count sweep the job CSV gets one file per count.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace gridsim::experiment
