#include "gridsim/runtime/grid_runtime.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gridsim/error.hpp"
#include "gridsim/model/partition.hpp"
#include "runtime_impl.hpp"

namespace gridsim::runtime {

using sim::EventKind;
using sim::MsgType;
using sim::TimerType;

GridRuntime::Impl::Impl(const model::GridTopology& topology, RuntimeConfig config)
    : topo(topology),
      cfg(std::move(config)),
      routing(topo),
      sim(cfg.keep_trace),
      probe_rng(cfg.probe_seed),
      subgrid_of(topo.subgrid_index()) {
    cfg.erasure.validate();
    if (cfg.checkpoint) {
        const auto v = cfg.checkpoint->violations();
        if (!v.empty()) throw InvalidSpec(v.front());
    }
    nodes.resize(topo.size());
    for (auto& n : nodes) {
        if (cfg.checkpoint) {
            n.history = resilience::FailureHistory(cfg.checkpoint->history_weight);
            const auto [i0, i1] = resilience::seed_intervals(n.history, cfg.checkpoint->checkpoint_cost, *cfg.checkpoint);
            n.interval_prev2 = i0;
            n.interval_prev = i1;
        }
    }
    for (const auto& sg : topo.subgrids) {
        SubgridState s;
        s.id = sg.id;
        s.region = sg.region;
        s.members = sg.members;
        s.initial_leader = sg.super_peer;
        s.policy.kind = cfg.policy;
        subgrids.push_back(std::move(s));
    }
    for (const auto& r : topo.regions) {
        RegionState s;
        s.id = r.id;
        s.subgrids = r.subgrids;
        regions.push_back(std::move(s));
    }
}

void GridRuntime::Impl::bootstrap() {
    bootstrapped = true;
    // Roles, registries, shares and power tables start populated; no
    // messages are exchanged for the initial overlay.
    for (auto& sg : subgrids) {
        std::vector<NodeId> present;
        for (NodeId m : sg.members)
            if (node(m).present) present.push_back(m);
        sg.leader = model::most_available(topo.nodes, present);
        if (sg.leader != kNoNode) sg.initial_leader = sg.leader;
        for (NodeId m : sg.members) node(m).cached_sp = sg.initial_leader;
        if (sg.leader == kNoNode) continue;
        sg.registry = discovery::Registry(sg.id, sg.leader);
        for (NodeId m : present) sg.registry.upsert(describe(m));
        for (auto& [holder, held] : encode_shares(sg.id)) node(holder).share = std::move(held);
    }
    for (auto& r : regions) {
        std::vector<NodeId> leaders;
        for (SubgridId s : r.subgrids)
            if (subgrids[static_cast<std::size_t>(s)].leader != kNoNode)
                leaders.push_back(subgrids[static_cast<std::size_t>(s)].leader);
        r.peer = model::most_available(topo.nodes, leaders);
        if (r.peer == kNoNode) continue;
        for (SubgridId s : r.subgrids) {
            const auto& sg = subgrids[static_cast<std::size_t>(s)];
            if (sg.leader != kNoNode) r.power[s] = discovery::aggregate_power(sg.registry);
        }
    }
}

sim::Tier GridRuntime::Impl::tier(NodeId from, NodeId to) const {
    const SubgridId a = subgrid_of[static_cast<std::size_t>(from)];
    const SubgridId b = subgrid_of[static_cast<std::size_t>(to)];
    if (a == b) return sim::Tier::Intra;
    if (subgrids[static_cast<std::size_t>(a)].region == subgrids[static_cast<std::size_t>(b)].region)
        return sim::Tier::Region;
    return sim::Tier::Inter;
}

double GridRuntime::Impl::delay(NodeId from, NodeId to, double bytes) const {
    if (from == to) return 0.0;
    return sim::transfer_time(bytes, routing.metrics(from, to));
}

void GridRuntime::Impl::send(NodeId from, NodeId to, MsgType type, std::int64_t ref, JobId job, double extra_bytes,
                             std::function<void()> deliver, std::function<void()> dropped) {
    sim::MessagePayload m{type, tier(from, to), from, to, ref, job, false};
    const double d = delay(from, to, cfg.message_bytes + extra_bytes);
    sim.schedule_in(d, EventKind::MessageDelivery, m,
                    [this, to, job, deliver = std::move(deliver), dropped = std::move(dropped)](sim::Event& ev) {
                        auto& p = std::get<sim::MessagePayload>(ev.payload);
                        if (job >= 0) {
                            auto it = jobs.find(job);
                            if (it != jobs.end()) {
                                auto& rec = it->second.record;
                                if (p.tier == sim::Tier::Intra) ++rec.messages_intra;
                                else if (p.tier == sim::Tier::Region) ++rec.messages_region;
                                else ++rec.messages_inter_region;
                            }
                        }
                        if (!reachable(to)) {
                            p.dropped = true;
                            if (dropped) dropped();
                            return;
                        }
                        if (deliver) deliver();
                    });
}

sim::EventHandle GridRuntime::Impl::timer(double delay, TimerType type, NodeId n, std::int64_t ref, double value,
                                          std::function<void()> fire) {
    return sim.schedule_in(delay, EventKind::Timer, sim::TimerPayload{type, n, ref, value},
                           [fire = std::move(fire)](sim::Event&) { fire(); });
}

broker::ResourceDescription GridRuntime::Impl::describe(NodeId n) const {
    const auto& s = spec(n);
    const auto& st = nodes[static_cast<std::size_t>(n)];
    return {n, s.capability, s.owner_share, static_cast<int>(st.assigned.size()), s.storage - st.assigned_bytes,
            sim.now()};
}

void GridRuntime::Impl::on_fail(NodeId n) {
    NodeState& ns = node(n);
    if (!ns.up) return;
    ns.up = false;
    ++ns.epoch;
    ns.history.record(sim.now());
    sim.cancel(ns.register_timer);
    sim.cancel(ns.rediscover_timer);
    ns.registered = false;

    const std::vector<JobId> running(ns.assigned.begin(), ns.assigned.end());
    for (JobId j : running) abort_on_node_failure(j);
    ns.assigned.clear();
    ns.active.clear();
    sim.cancel(ns.completion);
    ns.assigned_bytes = 0.0;

    // Checkpoints parked here are gone, and so is input data still in flight.
    ns.exported.clear();
    for (JobId j : ns.origin_jobs) {
        JobState& js = jobs.at(j);
        switch (js.phase) {
            case Phase::Transferring:
                abort_transfer_from_origin(j);
                break;
            case Phase::Queued:
            case Phase::Polling:
            case Phase::Escalating:
            case Phase::WaitingOrigin:
                js.record.redone_flop += js.progress;
                js.progress = 0.0;
                break;
            default:
                break;
        }
    }
    ns.share.reset();

    const std::uint64_t epoch = ns.epoch;
    timer(cfg.detection_timeout(), TimerType::Detect, n, -1, static_cast<double>(epoch),
          [this, n, epoch] { on_detect(n, epoch); });
}

void GridRuntime::Impl::on_recover(NodeId n) {
    NodeState& ns = node(n);
    if (ns.up) return;
    ns.up = true;
    ns.ps_updated = sim.now();
    if (cfg.checkpoint) reseed_intervals(n);
    start_registration(n, ns.cached_sp == n ? kNoNode : ns.cached_sp);
    for (JobId j : ns.origin_jobs) {
        JobState& js = jobs.at(j);
        if (js.phase != Phase::WaitingOrigin) continue;
        if (js.needs_restore) {
            restore_and_requeue(j);
        } else {
            enqueue(j, subgrid_of[static_cast<std::size_t>(n)]);
        }
    }
}

void GridRuntime::Impl::on_detect(NodeId n, std::uint64_t epoch) {
    SubgridState& sg = subgrid_of_node(n);
    RegionState& region = region_of(sg);
    if (sg.leader == n) {
        sg.leader = kNoNode;
        sg.failed_leader = n;
        if (region.peer != kNoNode && region.peer != n && reachable(region.peer)) region.power.erase(sg.id);
        start_election(false, sg.id, n);
    } else if (sg.leader != kNoNode && reachable(sg.leader) && !sg.regenerating) {
        const NodeState& ns = node(n);
        if (ns.epoch == epoch && !ns.up && sg.registry.mark_stale(n)) registry_changed(sg.id);
    }
    if (region.peer == n) {
        region.peer = kNoNode;
        region.power.clear();
        start_election(true, region.id, n);
    }
}

// ---------------------------------------------------------------------------

GridRuntime::GridRuntime(const model::GridTopology& topology, RuntimeConfig config)
    : impl_(std::make_unique<Impl>(topology, std::move(config))) {}

GridRuntime::~GridRuntime() = default;

void GridRuntime::submit(std::span<const model::Job> jobs) {
    for (const auto& job : jobs) {
        if (job.origin_node < 0 || static_cast<std::size_t>(job.origin_node) >= impl_->topo.size())
            throw GridError("job " + std::to_string(job.job_id) + " has an unknown origin node");
        if (impl_->jobs.count(job.job_id)) throw GridError("duplicate job id " + std::to_string(job.job_id));
        JobState js;
        js.job = job;
        auto& r = js.record;
        r.job_id = job.job_id;
        r.policy = std::string(broker::to_string(impl_->cfg.policy));
        r.job_class = job.job_class;
        r.submit_time = job.submit_time;
        r.origin_subgrid = impl_->subgrid_of[static_cast<std::size_t>(job.origin_node)];
        r.flop_demand = job.flop_demand;
        r.byte_demand = job.byte_demand;
        impl_->jobs.emplace(job.job_id, std::move(js));
        impl_->node(job.origin_node).origin_jobs.push_back(job.job_id);
        const JobId id = job.job_id;
        Impl* impl = impl_.get();
        impl_->sim.schedule(job.submit_time, EventKind::Timer,
                            sim::TimerPayload{TimerType::Submit, job.origin_node, id, 0.0},
                            [impl, id](sim::Event&) { impl->on_submit(id); });
    }
}

void GridRuntime::inject_failure(NodeId n, double fail_time, std::optional<double> recover_time) {
    if (n < 0 || static_cast<std::size_t>(n) >= impl_->topo.size())
        throw GridError("failure for unknown node " + std::to_string(n));
    if (recover_time && !(*recover_time > fail_time))
        throw InvalidSchedule("node " + std::to_string(n) + " recovers before it fails");
    auto& outages = impl_->node(n).outages;
    const double end = recover_time.value_or(std::numeric_limits<double>::infinity());
    for (const auto& [f, r] : outages) {
        const double other_end = r.value_or(std::numeric_limits<double>::infinity());
        if (fail_time < other_end && f < end)
            throw InvalidSchedule("overlapping failure intervals for node " + std::to_string(n));
    }
    outages.emplace_back(fail_time, recover_time);
    Impl* impl = impl_.get();
    impl_->sim.schedule(fail_time, EventKind::NodeFail, sim::NodePayload{n},
                        [impl, n](sim::Event&) { impl->on_fail(n); });
    if (recover_time)
        impl_->sim.schedule(*recover_time, EventKind::NodeRecover, sim::NodePayload{n},
                            [impl, n](sim::Event&) { impl->on_recover(n); });
}

void GridRuntime::apply(const sim::FailureSchedule& schedule) {
    schedule.validate(static_cast<int>(impl_->topo.size()));
    for (const auto& e : schedule.entries) inject_failure(e.node, e.fail_time, e.recover_time);
}

void GridRuntime::schedule_join(NodeId n, double join_time, NodeId bootstrap) {
    if (impl_->bootstrapped) throw std::logic_error("schedule_join must precede the first run");
    if (n < 0 || static_cast<std::size_t>(n) >= impl_->topo.size())
        throw GridError("join for unknown node " + std::to_string(n));
    impl_->node(n).present = false;
    impl_->node(n).registered = false;
    Impl* impl = impl_.get();
    impl_->sim.schedule(join_time, EventKind::Timer, sim::TimerPayload{TimerType::Join, n, -1, 0.0},
                        [impl, n, bootstrap](sim::Event&) {
                            NodeState& ns = impl->node(n);
                            ns.present = true;
                            ns.ps_updated = impl->sim.now();
                            const NodeId target =
                                bootstrap != kNoNode ? bootstrap : impl->subgrid_of_node(n).initial_leader;
                            impl->start_registration(n, target == n ? kNoNode : target);
                        });
}

std::int64_t GridRuntime::issue_query(NodeId origin, const model::QueryConstraint& constraint, double time) {
    if (origin < 0 || static_cast<std::size_t>(origin) >= impl_->topo.size())
        throw GridError("query from unknown node " + std::to_string(origin));
    const std::int64_t id = impl_->next_query++;
    QueryState qs;
    qs.outcome.message.query_id = id;
    qs.outcome.message.constraint = constraint;
    qs.outcome.message.origin = origin;
    qs.outcome.issued_at = time;
    qs.origin_subgrid = impl_->subgrid_of[static_cast<std::size_t>(origin)];
    impl_->queries.emplace(id, std::move(qs));
    Impl* impl = impl_.get();
    impl_->sim.schedule(time, EventKind::Timer, sim::TimerPayload{TimerType::QueryIssue, origin, id, 0.0},
                        [impl, id, origin](sim::Event&) { impl->start_query(id, origin); });
    return id;
}

const sim::Trace& GridRuntime::run_until(double t_end) {
    if (!impl_->bootstrapped) impl_->bootstrap();
    return impl_->sim.run_until(t_end);
}

const sim::Trace& GridRuntime::run() {
    if (!impl_->bootstrapped) impl_->bootstrap();
    auto& s = impl_->sim;
    while (s.pending() > 0 && s.step()) {
        if (s.now() > impl_->cfg.horizon) break;
    }
    return s.trace();
}

double GridRuntime::now() const { return impl_->sim.now(); }
const sim::Trace& GridRuntime::trace() const { return impl_->sim.trace(); }
sim::Simulator& GridRuntime::simulator() { return impl_->sim; }
const model::GridTopology& GridRuntime::topology() const { return impl_->topo; }
const sim::Routing& GridRuntime::routing() const { return impl_->routing; }
const RuntimeConfig& GridRuntime::config() const { return impl_->cfg; }

std::vector<sim::JobRecord> GridRuntime::job_records() const {
    std::vector<sim::JobRecord> out;
    out.reserve(impl_->jobs.size());
    for (const auto& [id, js] : impl_->jobs) out.push_back(js.record);
    return out;
}

const QueryOutcome& GridRuntime::query(std::int64_t id) const { return impl_->queries.at(id).outcome; }

bool GridRuntime::alive(NodeId n) const { return impl_->reachable(n); }

NodeId GridRuntime::superpeer(SubgridId sg) const { return impl_->subgrids.at(static_cast<std::size_t>(sg)).leader; }

NodeId GridRuntime::regionpeer(RegionId r) const { return impl_->regions.at(static_cast<std::size_t>(r)).peer; }

NodeId GridRuntime::cached_superpeer(NodeId n) const { return impl_->nodes.at(static_cast<std::size_t>(n)).cached_sp; }

const discovery::Registry& GridRuntime::registry(SubgridId sg) const {
    return impl_->subgrids.at(static_cast<std::size_t>(sg)).registry;
}

const std::map<SubgridId, discovery::CumulativePower>& GridRuntime::power_table(RegionId r) const {
    return impl_->regions.at(static_cast<std::size_t>(r)).power;
}

std::vector<NodeId> GridRuntime::share_holders(SubgridId sg) const {
    std::vector<NodeId> out;
    for (NodeId m : impl_->subgrids.at(static_cast<std::size_t>(sg)).members)
        if (impl_->nodes[static_cast<std::size_t>(m)].share) out.push_back(m);
    return out;
}

const std::vector<ElectionRecord>& GridRuntime::elections() const { return impl_->elections; }
const std::vector<RegenerationRecord>& GridRuntime::regenerations() const { return impl_->regenerations; }
const std::vector<RegistrationRecord>& GridRuntime::registrations() const { return impl_->registrations; }

}  // namespace gridsim::runtime
