#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gridsim/broker/policy.hpp"
#include "gridsim/discovery/dispatch.hpp"
#include "gridsim/discovery/registry.hpp"
#include "gridsim/model/types.hpp"
#include "gridsim/resilience/checkpoint.hpp"
#include "gridsim/resilience/erasure.hpp"
#include "gridsim/sim/failure.hpp"
#include "gridsim/sim/job_record.hpp"
#include "gridsim/sim/network.hpp"
#include "gridsim/sim/simulator.hpp"

namespace gridsim::runtime {

struct RuntimeConfig {
    broker::PolicyKind policy = broker::PolicyKind::Ncda;

    double message_bytes = 512.0;   // size of every control message
    double probe_bytes = 4096.0;    // extra payload of an NCDA bandwidth probe
    double probe_noise = 0.0;       // multiplicative noise amplitude, 0 = exact probes
    std::uint64_t probe_seed = 0;
    double poll_timeout = 5.0;

    double heartbeat_period = 1.0;
    int missed_heartbeats = 3;
    double election_round = 0.5;    // answer timeout; must exceed intra-sub-grid rtt
    double register_timeout = 1.0;
    double rediscover_timeout = 1.0;
    int rediscover_max_retries = 4;
    double escalation_timeout = 10.0;
    int max_escalation_retries = 5;

    resilience::ErasureParams erasure{2, 4};
    std::optional<resilience::CheckpointPolicy> checkpoint;

    bool keep_trace = true;
    double horizon = 1e12;           // run() stops here

    double detection_timeout() const { return heartbeat_period * missed_heartbeats; }
};

struct QueryOutcome {
    enum class Status { Pending, Found, NotFound };
    Status status = Status::Pending;
    std::vector<NodeId> matches;
    SubgridId found_in = -1;
    discovery::QueryMessage message;
    std::map<RegionId, int> region_visits;  // times each region peer handled the query
    double issued_at = 0.0;
    double resolved_at = 0.0;
};

struct ElectionRecord {
    bool region = false;
    int group = -1;  // sub-grid or region id
    double started = 0.0;
    double finished = 0.0;
    NodeId leader = kNoNode;
    std::uint64_t messages = 0;
    bool self_elected = false;  // singleton after rediscovery gave up
};

struct RegenerationRecord {
    SubgridId subgrid = -1;
    NodeId leader = kNoNode;
    double time = 0.0;
    bool decoded = false;
    int shares_used = 0;
    discovery::Registry registry;  // as decoded, before the new leader mutates it
};

struct RegistrationRecord {
    NodeId node = kNoNode;
    NodeId superpeer = kNoNode;
    double time = 0.0;
    int multicasts = 0;
};

/// One simulated grid: nodes, the two-tier overlay, brokering, failures,
/// self-healing and checkpointing, all driven by a single Simulator.
class GridRuntime {
public:
    GridRuntime(const model::GridTopology& topology, RuntimeConfig config);
    ~GridRuntime();
    GridRuntime(const GridRuntime&) = delete;
    GridRuntime& operator=(const GridRuntime&) = delete;

    void submit(std::span<const model::Job> jobs);

    /// Throws InvalidSchedule if the interval overlaps an earlier one for
    /// the node, GridError if the node does not exist.
    void inject_failure(NodeId node, double fail_time, std::optional<double> recover_time);
    void apply(const sim::FailureSchedule& schedule);

    /// Keeps `node` out of the grid until `join_time`, then has it register
    /// with `bootstrap` (its sub-grid's initial super-peer by default).
    void schedule_join(NodeId node, double join_time, NodeId bootstrap = kNoNode);

    /// Resource query from `origin` at `time`; returns the query id.
    std::int64_t issue_query(NodeId origin, const model::QueryConstraint& constraint, double time);

    const sim::Trace& run_until(double t_end);
    const sim::Trace& run();

    double now() const;
    const sim::Trace& trace() const;
    sim::Simulator& simulator();
    const model::GridTopology& topology() const;
    const sim::Routing& routing() const;
    const RuntimeConfig& config() const;

    /// Records sorted by job id.
    std::vector<sim::JobRecord> job_records() const;
    const QueryOutcome& query(std::int64_t id) const;

    bool alive(NodeId node) const;
    NodeId superpeer(SubgridId subgrid) const;     // kNoNode while leaderless
    NodeId regionpeer(RegionId region) const;
    NodeId cached_superpeer(NodeId node) const;    // the node's own belief
    const discovery::Registry& registry(SubgridId subgrid) const;
    const std::map<SubgridId, discovery::CumulativePower>& power_table(RegionId region) const;
    /// Nodes currently holding a share of the sub-grid's registry.
    std::vector<NodeId> share_holders(SubgridId subgrid) const;

    const std::vector<ElectionRecord>& elections() const;
    const std::vector<RegenerationRecord>& regenerations() const;
    const std::vector<RegistrationRecord>& registrations() const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

}  // namespace gridsim::runtime
