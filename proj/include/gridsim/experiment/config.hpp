#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridsim/broker/policy.hpp"
#include "gridsim/model/generate.hpp"
#include "gridsim/model/types.hpp"
#include "gridsim/resilience/checkpoint.hpp"
#include "gridsim/resilience/erasure.hpp"
#include "gridsim/runtime/grid_runtime.hpp"
#include "gridsim/sim/failure.hpp"

namespace gridsim::experiment {

struct WorkloadSpec {
    model::JobClass job_class = model::JobClass::Hybrid;
    int count = 1000;
    model::SubmitPolicy submit_policy;
};

/// Either explicit entries or a generator drawn per seed; neither means no
/// failures.
struct FailureSpec {
    std::optional<sim::FailureSchedule> schedule;
    std::optional<sim::FailureGenerator> generator;
};

struct DetectorSpec {
    double heartbeat_period = 1.0;
    int missed_heartbeats = 3;
    double election_round = 0.5;
};

struct BrokerSpec {
    double message_bytes = 512.0;
    double probe_bytes = 4096.0;
    double probe_noise = 0.0;
    double poll_timeout = 5.0;
};

struct ExperimentConfig {
    model::PlatformSpec platform;
    WorkloadSpec workload;
    std::vector<broker::PolicyKind> policies;
    FailureSpec failures;
    resilience::ErasureParams erasure;
    std::optional<resilience::CheckpointPolicy> checkpoint;
    DetectorSpec detector;
    BrokerSpec broker;
    std::vector<std::uint64_t> seeds;
    std::string output_path = "out";
    std::vector<int> node_counts;  // optional sweep; empty means platform.node_count only
    bool write_traces = false;

    /// node_counts, or the platform's own count when no sweep is given.
    std::vector<int> sweep() const;
};

/// Checks every field and reports all violations at once (ValidationError).
ExperimentConfig validate_config(const nlohmann::json& raw);

/// Parses and validates; malformed text raises ParseError with line/column.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

/// Runtime settings for one run of `config` under `policy`.
runtime::RuntimeConfig runtime_config(const ExperimentConfig& config, broker::PolicyKind policy, std::uint64_t seed);

}  // namespace gridsim::experiment
