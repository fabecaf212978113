// Job lifecycle: sub-grid brokering, placement, processor-shared execution,
// checkpoints, failure recovery and escalation beyond the origin sub-grid.

#include <algorithm>
#include <cmath>

#include "runtime_impl.hpp"

namespace gridsim::runtime {

using sim::EventKind;
using sim::MsgType;
using sim::TimerType;

model::QueryConstraint GridRuntime::Impl::job_constraint(const model::Job& job) const {
    return {1.0, job.byte_demand, 1};
}

void GridRuntime::Impl::on_submit(JobId id) {
    JobState& js = jobs.at(id);
    if (!reachable(js.job.origin_node)) {
        js.phase = Phase::WaitingOrigin;
        return;
    }
    enqueue(id, subgrid_of[static_cast<std::size_t>(js.job.origin_node)]);
}

void GridRuntime::Impl::enqueue(JobId id, SubgridId sg) {
    JobState& js = jobs.at(id);
    if (sg == subgrid_of[static_cast<std::size_t>(js.job.origin_node)]) {
        js.tried.clear();
        js.esc_region = -1;
        js.esc_remaining.clear();
        js.esc_retries = 0;
    }
    js.phase = Phase::Queued;
    js.broker_subgrid = sg;
    subgrids[static_cast<std::size_t>(sg)].queue.push_back(id);
    kick_broker(sg);
}

void GridRuntime::Impl::kick_broker(SubgridId sg) {
    SubgridState& s = subgrids[static_cast<std::size_t>(sg)];
    while (!s.busy && s.leader != kNoNode && !s.regenerating && !s.queue.empty()) {
        const JobId id = s.queue.front();
        JobState& js = jobs.at(id);
        if (js.phase != Phase::Queued || js.broker_subgrid != sg) {
            s.queue.pop_front();
            continue;
        }
        const NodeId origin = js.job.origin_node;
        if (!reachable(origin)) {
            s.queue.pop_front();
            js.phase = Phase::WaitingOrigin;
            continue;
        }
        const bool local = sg == subgrid_of[static_cast<std::size_t>(origin)];
        const NodeId requester = local ? origin : s.leader;
        if (!reachable(requester)) return;  // wait for the new super-peer
        s.queue.pop_front();
        start_poll(sg, id, requester);
    }
}

void GridRuntime::Impl::start_poll(SubgridId sg, JobId id, NodeId requester) {
    SubgridState& s = subgrids[static_cast<std::size_t>(sg)];
    JobState& js = jobs.at(id);
    s.busy = true;
    js.phase = Phase::Polling;
    const std::int64_t decision = next_decision++;
    std::vector<NodeId> members;
    for (const auto& [m, entry] : s.registry.entries()) members.push_back(m);
    auto [it, inserted] = polls.emplace(decision, PollCtx{broker::PollRound(decision, id, requester, sg, members), {}});
    if (members.empty()) {
        close_poll(decision);
        return;
    }
    for (NodeId m : members)
        send(requester, m, MsgType::PollRequest, decision, id, 0.0,
             [this, decision, m, requester, id] { on_poll_request(decision, m, requester, id); });
    it->second.timeout = timer(cfg.poll_timeout, TimerType::PollTimeout, requester, decision, 0.0,
                               [this, decision] { close_poll(decision); });
}

void GridRuntime::Impl::on_poll_request(std::int64_t decision, NodeId member, NodeId requester, JobId job) {
    broker::Bid bid;
    bid.description = describe(member);
    if (member == requester) {
        bid.measured_bandwidth = sim::kInfiniteBandwidth;
        bid.measured_rtt = 0.0;
    } else {
        const auto& path = routing.metrics(requester, member);
        double factor = 1.0;
        if (cfg.probe_noise > 0.0) factor = 1.0 + cfg.probe_noise * (2.0 * probe_rng.unit() - 1.0);
        bid.measured_bandwidth = path.bandwidth * factor;
        bid.measured_rtt = path.rtt();
    }
    const double extra = broker::needs_bandwidth_probe(cfg.policy) ? cfg.probe_bytes : 0.0;
    send(member, requester, MsgType::PollResponse, decision, job, extra, [this, decision, bid] {
        auto it = polls.find(decision);
        if (it == polls.end() || it->second.round.closed()) return;
        if (it->second.round.add_response(bid)) close_poll(decision);
    });
}

void GridRuntime::Impl::close_poll(std::int64_t decision) {
    auto it = polls.find(decision);
    if (it == polls.end()) return;
    PollCtx ctx = std::move(it->second);
    polls.erase(it);
    sim.cancel(ctx.timeout);
    ctx.round.close();

    const SubgridId sg = ctx.round.subgrid();
    SubgridState& s = subgrids[static_cast<std::size_t>(sg)];
    s.busy = false;
    const JobId id = ctx.round.job();
    JobState& js = jobs.at(id);
    if (js.phase == Phase::Polling) {
        const NodeId requester = ctx.round.requester();
        if (!reachable(js.job.origin_node)) {
            js.phase = Phase::WaitingOrigin;
        } else if (!reachable(requester)) {
            js.phase = Phase::Queued;
            s.queue.push_front(id);
        } else {
            std::vector<broker::Bid> bids;
            for (auto& b : ctx.round.sorted_bids())
                if (b.description.free_storage >= js.job.byte_demand) bids.push_back(b);
            if (bids.empty()) {
                escalate(id, requester);
            } else {
                place(id, broker::select(s.policy, js.job, bids));
            }
        }
    }
    kick_broker(sg);
}

void GridRuntime::Impl::place(JobId id, NodeId target) {
    JobState& js = jobs.at(id);
    auto& rec = js.record;
    const NodeId origin = js.job.origin_node;
    const double bytes = js.job.byte_demand;
    ++js.placement;
    js.placement_start = js.progress;
    js.node = target;
    if (!rec.start_time) rec.start_time = sim.now();
    rec.node_id = target;
    rec.exec_subgrid = subgrid_of[static_cast<std::size_t>(target)];
    rec.data_bytes += bytes;

    NodeState& ns = node(target);
    if (!reachable(target)) {
        // The winner died after bidding; its input is lost on arrival.
        rec.redone_bytes += bytes;
        js.lost_progress = js.progress;
        js.phase = Phase::Recovering;
        ++rec.restarts;
        timer(cfg.detection_timeout(), TimerType::JobRecover, origin, id, 0.0, [this, id] { on_job_recover(id); });
        return;
    }
    js.phase = Phase::Transferring;
    js.node_epoch = ns.epoch;
    ns.assigned.insert(id);
    ns.assigned_bytes += bytes;

    const double t = origin == target ? 0.0 : sim::transfer_time(bytes, routing.metrics(origin, target));
    const int placement = js.placement;
    js.transfer = sim.schedule_in(
        t, EventKind::TransferComplete,
        sim::TransferPayload{sim::TransferPayload::Purpose::JobData, id, origin, target, bytes, false},
        [this, id, placement](sim::Event& ev) {
            JobState& j = jobs.at(id);
            if (j.placement != placement || j.phase != Phase::Transferring) {
                std::get<sim::TransferPayload>(ev.payload).aborted = true;
                return;
            }
            start_compute(id);
        });
}

void GridRuntime::Impl::start_compute(JobId id) {
    JobState& js = jobs.at(id);
    js.phase = Phase::Computing;
    if (js.job.flop_demand - js.progress <= 0.0) {
        finish_job(id);
        return;
    }
    const NodeId n = js.node;
    ps_advance(n);
    node(n).active.push_back(id);
    ps_reschedule(n);
    arm_checkpoint(id);
}

void GridRuntime::Impl::finish_job(JobId id) {
    JobState& js = jobs.at(id);
    NodeState& ns = node(js.node);
    ns.assigned.erase(id);
    ns.assigned_bytes -= js.job.byte_demand;
    js.progress = js.job.flop_demand;
    js.record.executed_flop += js.job.flop_demand - js.placement_start;
    js.record.end_time = sim.now();
    js.phase = Phase::Done;
    sim.cancel(js.checkpoint);
    sim.cancel(js.resume);
    node(js.job.origin_node).exported.erase(id);
}

void GridRuntime::Impl::ps_advance(NodeId n) {
    NodeState& ns = node(n);
    const double dt = sim.now() - ns.ps_updated;
    ns.ps_updated = sim.now();
    if (dt <= 0.0 || ns.active.empty()) return;
    const double rate = spec(n).effective_rate() / static_cast<double>(ns.active.size());
    for (JobId j : ns.active) {
        JobState& js = jobs.at(j);
        js.progress = std::min(js.job.flop_demand, js.progress + dt * rate);
    }
}

void GridRuntime::Impl::ps_reschedule(NodeId n) {
    NodeState& ns = node(n);
    sim.cancel(ns.completion);
    if (ns.active.empty()) return;
    const double rate = spec(n).effective_rate() / static_cast<double>(ns.active.size());
    JobId next = -1;
    double least = 0.0;
    for (JobId j : ns.active) {
        const JobState& js = jobs.at(j);
        const double remaining = js.job.flop_demand - js.progress;
        if (next < 0 || remaining < least || (remaining == least && j < next)) {
            next = j;
            least = remaining;
        }
    }
    const double flop = jobs.at(next).job.flop_demand;
    ns.completion = sim.schedule_in(std::max(0.0, least) / rate, EventKind::ComputeComplete,
                                    sim::ComputePayload{next, n, flop},
                                    [this, n, next](sim::Event&) { on_compute_complete(n, next); });
}

void GridRuntime::Impl::ps_remove(NodeId n, JobId id) {
    auto& active = node(n).active;
    active.erase(std::remove(active.begin(), active.end(), id), active.end());
}

void GridRuntime::Impl::on_compute_complete(NodeId n, JobId id) {
    ps_advance(n);
    ps_remove(n, id);
    finish_job(id);
    ps_reschedule(n);
}

// ---------------------------------------------------------------------------
// Checkpoints

double GridRuntime::Impl::advance_interval(NodeId n) {
    NodeState& ns = node(n);
    const double next = resilience::next_interval(*cfg.checkpoint, ns.interval_prev, ns.interval_prev2);
    ns.interval_prev2 = ns.interval_prev;
    ns.interval_prev = next;
    return next;
}

void GridRuntime::Impl::reseed_intervals(NodeId n) {
    NodeState& ns = node(n);
    const auto seeds = resilience::seed_intervals(ns.history, cfg.checkpoint->checkpoint_cost, *cfg.checkpoint);
    ns.interval_prev2 = ns.interval_prev;
    ns.interval_prev = seeds.second;
}

void GridRuntime::Impl::arm_checkpoint(JobId id) {
    if (!cfg.checkpoint) return;
    JobState& js = jobs.at(id);
    const double interval = advance_interval(js.node);
    const int placement = js.placement;
    js.checkpoint = sim.schedule_in(interval, EventKind::CheckpointDue, sim::CheckpointPayload{id, js.node, 0, 0.0, false},
                                    [this, id, placement](sim::Event& ev) { on_checkpoint(ev, id, placement); });
}

void GridRuntime::Impl::on_checkpoint(sim::Event& ev, JobId id, int placement) {
    JobState& js = jobs.at(id);
    if (js.placement != placement || js.phase != Phase::Computing) return;
    const auto& policy = *cfg.checkpoint;
    const NodeId n = js.node;
    ps_advance(n);
    ps_remove(n, id);
    ps_reschedule(n);
    js.phase = Phase::Checkpointing;

    const int index = ++js.record.checkpoints_taken;
    const double saved = std::floor(js.progress);
    const bool exported = index % policy.export_every == 0;
    auto& payload = std::get<sim::CheckpointPayload>(ev.payload);
    payload.index = index;
    payload.progress = saved;
    payload.exported = exported;

    if (exported) {
        const NodeId origin = js.job.origin_node;
        const std::uint64_t epoch = node(n).epoch;
        js.record.export_bytes += policy.export_bytes;
        const double t = origin == n ? 0.0 : sim::transfer_time(policy.export_bytes, routing.metrics(n, origin));
        sim.schedule_in(
            t, EventKind::TransferComplete,
            sim::TransferPayload{sim::TransferPayload::Purpose::Export, id, n, origin, policy.export_bytes, false},
            [this, id, placement, n, epoch, origin, saved](sim::Event& e) {
                JobState& j = jobs.at(id);
                const bool ok = j.placement == placement && node(n).epoch == epoch && reachable(origin) &&
                                j.phase != Phase::Done;
                if (!ok) {
                    std::get<sim::TransferPayload>(e.payload).aborted = true;
                    return;
                }
                node(origin).exported[id] = saved;
                ++j.record.exports_taken;
            });
    }

    js.resume = timer(policy.checkpoint_cost, TimerType::CheckpointDone, n, id, saved, [this, id, placement] {
        JobState& j = jobs.at(id);
        if (j.placement != placement || j.phase != Phase::Checkpointing) return;
        ps_advance(j.node);
        j.phase = Phase::Computing;
        node(j.node).active.push_back(id);
        ps_reschedule(j.node);
        arm_checkpoint(id);
    });
}

// ---------------------------------------------------------------------------
// Failures

void GridRuntime::Impl::abort_on_node_failure(JobId id) {
    JobState& js = jobs.at(id);
    auto& rec = js.record;
    if (js.phase == Phase::Computing) ps_advance(js.node);
    if (js.phase == Phase::Transferring) sim.cancel(js.transfer);
    sim.cancel(js.checkpoint);
    sim.cancel(js.resume);
    rec.redone_bytes += js.job.byte_demand;

    // Whole FLOPs only, so executed and redone work add up exactly.
    const double p = std::floor(js.progress);
    rec.executed_flop += p - js.placement_start;
    js.progress = p;
    js.lost_progress = p;
    js.phase = Phase::Recovering;
    ++rec.restarts;
    timer(cfg.detection_timeout(), TimerType::JobRecover, js.job.origin_node, id, p,
          [this, id] { on_job_recover(id); });
}

void GridRuntime::Impl::abort_transfer_from_origin(JobId id) {
    JobState& js = jobs.at(id);
    sim.cancel(js.transfer);
    NodeState& ns = node(js.node);
    ns.assigned.erase(id);
    ns.assigned_bytes -= js.job.byte_demand;
    js.record.redone_bytes += js.job.byte_demand;
    js.record.redone_flop += js.progress;
    js.progress = 0.0;
    js.needs_restore = false;
    js.phase = Phase::WaitingOrigin;
}

void GridRuntime::Impl::on_job_recover(JobId id) {
    JobState& js = jobs.at(id);
    if (js.phase != Phase::Recovering) return;
    if (!reachable(js.job.origin_node)) {
        js.phase = Phase::WaitingOrigin;
        js.needs_restore = true;
        return;
    }
    restore_and_requeue(id);
}

void GridRuntime::Impl::restore_and_requeue(JobId id) {
    JobState& js = jobs.at(id);
    const NodeId origin = js.job.origin_node;
    std::optional<double> parked;
    const auto& exported = node(origin).exported;
    if (auto it = exported.find(id); it != exported.end()) parked = it->second;
    const auto r = resilience::recover_progress(js.lost_progress, parked);
    js.record.redone_flop += r.redone_flop;
    if (r.from_zero) ++js.record.restarts_from_zero;
    js.progress = r.restored_flop;
    js.needs_restore = false;
    enqueue(id, subgrid_of[static_cast<std::size_t>(origin)]);
}

// ---------------------------------------------------------------------------
// Escalation: origin region peer, its other sub-grids, then other regions.

void GridRuntime::Impl::escalate(JobId id, NodeId from) {
    JobState& js = jobs.at(id);
    js.phase = Phase::Escalating;
    if (js.esc_region < 0) {
        const SubgridState& s = subgrids[static_cast<std::size_t>(js.broker_subgrid)];
        js.tried.insert(s.id);
        js.esc_region = s.region;
        js.esc_remaining = discovery::inter_region_order(s.region, static_cast<int>(regions.size()));
        forward_job(id, from, s.region);
        return;
    }
    const RegionId r = js.esc_region;
    const NodeId rp = regions[static_cast<std::size_t>(r)].peer;
    if (rp == kNoNode) {
        retry_escalation(id, from, r);
        return;
    }
    if (rp == from) {
        region_dispatch_job(id, r);
        return;
    }
    send(from, rp, MsgType::Decline, -1, id, 0.0, [this, id, r] { region_dispatch_job(id, r); },
         [this, id, from, r] { retry_escalation(id, from, r); });
}

void GridRuntime::Impl::forward_job(JobId id, NodeId from, RegionId r) {
    const NodeId rp = regions[static_cast<std::size_t>(r)].peer;
    if (rp == kNoNode) {
        retry_escalation(id, from, r);
        return;
    }
    jobs.at(id).esc_region = r;
    if (rp == from) {
        region_dispatch_job(id, r);
        return;
    }
    send(from, rp, MsgType::Forward, -1, id, 0.0, [this, id, r] { region_dispatch_job(id, r); },
         [this, id, from, r] { retry_escalation(id, from, r); });
}

void GridRuntime::Impl::retry_escalation(JobId id, NodeId from, RegionId r) {
    JobState& js = jobs.at(id);
    if (++js.esc_retries > cfg.max_escalation_retries) {
        abandon(id);
        return;
    }
    timer(cfg.escalation_timeout, TimerType::EscalationTimeout, from, id, 0.0, [this, id, from, r] {
        JobState& j = jobs.at(id);
        if (j.phase != Phase::Escalating) return;
        NodeId sender = from;
        if (!reachable(sender)) sender = j.job.origin_node;
        if (!reachable(sender)) {
            j.phase = Phase::WaitingOrigin;
            return;
        }
        forward_job(id, sender, r);
    });
}

void GridRuntime::Impl::region_dispatch_job(JobId id, RegionId r) {
    JobState& js = jobs.at(id);
    if (js.phase != Phase::Escalating) return;
    RegionState& reg = regions[static_cast<std::size_t>(r)];
    const NodeId rp = reg.peer;
    if (rp == kNoNode || !reachable(rp)) {
        retry_escalation(id, js.job.origin_node, r);
        return;
    }
    js.esc_region = r;
    for (;;) {
        const auto decision = discovery::region_dispatch(reg.power, job_constraint(js.job), js.tried);
        const auto* target = std::get_if<SubgridId>(&decision);
        if (!target) break;
        const SubgridId t = *target;
        js.tried.insert(t);
        const NodeId sp = subgrids[static_cast<std::size_t>(t)].leader;
        if (sp == kNoNode) continue;
        auto arrive = [this, id, t] {
            if (jobs.at(id).phase == Phase::Escalating) enqueue(id, t);
        };
        if (sp == rp) {
            arrive();
        } else {
            send(rp, sp, MsgType::Dispatch, -1, id, 0.0, arrive,
                 [this, id, r] { region_dispatch_job(id, r); });
        }
        return;
    }
    if (js.esc_remaining.empty()) {
        abandon(id);
        return;
    }
    const RegionId next = js.esc_remaining.front();
    js.esc_remaining.erase(js.esc_remaining.begin());
    forward_job(id, rp, next);
}

void GridRuntime::Impl::abandon(JobId id) {
    JobState& js = jobs.at(id);
    js.phase = Phase::Abandoned;
    timer(0.0, TimerType::JobAbandoned, js.job.origin_node, id, 0.0, [] {});
}

}  // namespace gridsim::runtime
