#pragma once

// Internal state of GridRuntime. The implementation is split by concern:
// grid_runtime.cpp (setup, messaging, failures), jobs.cpp (brokering,
// execution, checkpoints), overlay.cpp (registration, elections, shares,
// queries).

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "gridsim/broker/poll.hpp"
#include "gridsim/resilience/election.hpp"
#include "gridsim/rng.hpp"
#include "gridsim/runtime/grid_runtime.hpp"

namespace gridsim::runtime {

struct HeldShare {
    resilience::ErasureParams params;
    resilience::Share share;
};

struct NodeState {
    bool up = true;
    bool present = true;  // false until a scheduled join fires
    std::uint64_t epoch = 0;
    std::vector<std::pair<double, std::optional<double>>> outages;

    NodeId cached_sp = kNoNode;
    bool registered = true;
    int rediscover_attempt = 0;
    int multicasts = 0;
    sim::EventHandle register_timer;
    sim::EventHandle rediscover_timer;

    std::set<JobId> assigned;   // transferring, computing or checkpointing here
    std::vector<JobId> active;  // processor-sharing set
    double ps_updated = 0.0;
    sim::EventHandle completion;
    double assigned_bytes = 0.0;

    resilience::FailureHistory history;
    double interval_prev = 0.0;
    double interval_prev2 = 0.0;

    std::map<JobId, double> exported;  // checkpoints parked here by jobs this node submitted
    std::optional<HeldShare> share;
    std::vector<JobId> origin_jobs;
};

struct SubgridState {
    SubgridId id = -1;
    RegionId region = -1;
    std::vector<NodeId> members;
    NodeId initial_leader = kNoNode;

    NodeId leader = kNoNode;
    discovery::Registry registry;
    std::vector<NodeId> holders;

    std::deque<JobId> queue;
    bool busy = false;
    broker::PolicyState policy;

    std::int64_t election = -1;
    bool regenerating = false;
    NodeId failed_leader = kNoNode;
    std::vector<resilience::Share> collected;
    std::vector<resilience::ErasureParams> collected_params;
    std::vector<NodeId> waiting_discoverers;
};

struct RegionState {
    RegionId id = -1;
    std::vector<SubgridId> subgrids;
    NodeId peer = kNoNode;
    std::map<SubgridId, discovery::CumulativePower> power;
    std::int64_t election = -1;
};

enum class Phase {
    Pending,
    Queued,
    Polling,
    Escalating,
    Transferring,
    Computing,
    Checkpointing,
    Recovering,
    WaitingOrigin,
    Done,
    Abandoned,
};

struct JobState {
    model::Job job;
    sim::JobRecord record;
    Phase phase = Phase::Pending;

    NodeId node = kNoNode;
    std::uint64_t node_epoch = 0;
    int placement = 0;
    double progress = 0.0;         // FLOP done, restored value while not executing
    double placement_start = 0.0;  // progress when the current placement began
    double lost_progress = 0.0;    // progress at the last executing-node failure
    bool needs_restore = false;
    sim::EventHandle transfer;
    sim::EventHandle checkpoint;
    sim::EventHandle resume;

    // Brokering in a sub-grid other than the origin's, after escalation.
    SubgridId broker_subgrid = -1;
    std::set<SubgridId> tried;
    RegionId esc_region = -1;
    std::vector<RegionId> esc_remaining;
    int esc_retries = 0;
};

struct PollCtx {
    broker::PollRound round;
    sim::EventHandle timeout;
};

struct QueryState {
    QueryOutcome outcome;
    SubgridId origin_subgrid = -1;
    RegionId current_region = -1;
    std::vector<RegionId> remaining;
    std::set<SubgridId> tried;
    discovery::Stage stage = discovery::Stage::Subgrid;
};

struct ElectionCtx {
    std::unique_ptr<resilience::BullyElection> algo;
    bool region = false;
    int group = -1;
    std::size_t record = 0;
};

struct GridRuntime::Impl {
    Impl(const model::GridTopology& topology, RuntimeConfig config);

    model::GridTopology topo;
    RuntimeConfig cfg;
    sim::Routing routing;
    sim::Simulator sim;
    Rng probe_rng;
    std::vector<SubgridId> subgrid_of;

    std::vector<NodeState> nodes;
    std::vector<SubgridState> subgrids;
    std::vector<RegionState> regions;
    std::map<JobId, JobState> jobs;
    std::map<std::int64_t, PollCtx> polls;
    std::map<std::int64_t, QueryState> queries;
    std::map<std::int64_t, ElectionCtx> election_ctx;

    std::vector<ElectionRecord> elections;
    std::vector<RegenerationRecord> regenerations;
    std::vector<RegistrationRecord> registrations;

    std::int64_t next_decision = 0;
    std::int64_t next_query = 0;
    std::int64_t next_election = 0;
    bool bootstrapped = false;

    // grid_runtime.cpp
    void bootstrap();
    bool reachable(NodeId n) const { return nodes[static_cast<std::size_t>(n)].up && nodes[static_cast<std::size_t>(n)].present; }
    NodeState& node(NodeId n) { return nodes[static_cast<std::size_t>(n)]; }
    const model::NodeSpec& spec(NodeId n) const { return topo.node(n); }
    SubgridState& subgrid_of_node(NodeId n) { return subgrids[static_cast<std::size_t>(subgrid_of[static_cast<std::size_t>(n)])]; }
    RegionState& region_of(SubgridState& sg) { return regions[static_cast<std::size_t>(sg.region)]; }
    sim::Tier tier(NodeId from, NodeId to) const;
    double delay(NodeId from, NodeId to, double bytes) const;
    void send(NodeId from, NodeId to, sim::MsgType type, std::int64_t ref, JobId job, double extra_bytes,
              std::function<void()> deliver, std::function<void()> dropped = {});
    sim::EventHandle timer(double delay, sim::TimerType type, NodeId node, std::int64_t ref, double value,
                           std::function<void()> fire);
    broker::ResourceDescription describe(NodeId n) const;
    void on_fail(NodeId n);
    void on_recover(NodeId n);
    void on_detect(NodeId n, std::uint64_t epoch);

    // jobs.cpp
    void on_submit(JobId id);
    void enqueue(JobId id, SubgridId sg);
    void kick_broker(SubgridId sg);
    void start_poll(SubgridId sg, JobId id, NodeId requester);
    void on_poll_request(std::int64_t decision, NodeId member, NodeId requester, JobId job);
    void close_poll(std::int64_t decision);
    void place(JobId id, NodeId target);
    void start_compute(JobId id);
    void finish_job(JobId id);
    void ps_advance(NodeId n);
    void ps_reschedule(NodeId n);
    void ps_remove(NodeId n, JobId id);
    void on_compute_complete(NodeId n, JobId id);
    void arm_checkpoint(JobId id);
    void on_checkpoint(sim::Event& ev, JobId id, int placement);
    double advance_interval(NodeId n);
    void reseed_intervals(NodeId n);
    void abort_on_node_failure(JobId id);
    void abort_transfer_from_origin(JobId id);
    void on_job_recover(JobId id);
    void restore_and_requeue(JobId id);
    void escalate(JobId id, NodeId from);
    void forward_job(JobId id, NodeId from, RegionId r);
    void region_dispatch_job(JobId id, RegionId r);
    void retry_escalation(JobId id, NodeId from, RegionId r);
    void abandon(JobId id);
    model::QueryConstraint job_constraint(const model::Job& job) const;

    // overlay.cpp
    void start_registration(NodeId n, NodeId target);
    void send_register(NodeId n, NodeId target);
    void multicast(NodeId n);
    void on_multicast(NodeId n);
    void self_elect(NodeId n);
    std::vector<std::pair<NodeId, HeldShare>> encode_shares(SubgridId sg);
    void registry_changed(SubgridId sg);
    void push_power(SubgridId sg);
    void start_election(bool region, int group, NodeId failed);
    void on_election_leader(std::int64_t id, NodeId leader);
    void install_subgrid_leader(SubgridId sg, NodeId leader);
    void finish_regeneration(SubgridId sg);
    void announce_leader(SubgridId sg, NodeId to);
    void ensure_region_peer(RegionId r);

    void start_query(std::int64_t id, NodeId origin);
    void query_at_superpeer(std::int64_t id, NodeId sp, bool dispatched);
    void query_at_region(std::int64_t id, RegionId r);
    void region_step(std::int64_t id, RegionId r);
    void resolve_query(std::int64_t id, NodeId responder, std::vector<NodeId> matches, SubgridId found_in);
};

}  // namespace gridsim::runtime
