// Overlay maintenance: registration and multicast rediscovery, elections,
// erasure-coded registry shares, cumulative-power pushes, and resource
// queries through the two tiers.

#include <algorithm>
#include <cmath>

#include "gridsim/error.hpp"
#include "runtime_impl.hpp"

namespace gridsim::runtime {

using sim::EventKind;
using sim::MsgType;
using sim::TimerType;

// ---------------------------------------------------------------------------
// Registration

void GridRuntime::Impl::start_registration(NodeId n, NodeId target) {
    NodeState& ns = node(n);
    ns.registered = false;
    ns.rediscover_attempt = 0;
    ns.multicasts = 0;
    sim.cancel(ns.register_timer);
    sim.cancel(ns.rediscover_timer);
    if (target == kNoNode || target == n) {
        multicast(n);
    } else {
        send_register(n, target);
    }
}

void GridRuntime::Impl::send_register(NodeId n, NodeId target) {
    NodeState& ns = node(n);
    ns.cached_sp = target;
    sim.cancel(ns.register_timer);
    send(n, target, MsgType::Register, -1, -1, 0.0, [this, n, target] {
        SubgridState& sg = subgrid_of_node(n);
        if (sg.leader != target || sg.regenerating || subgrid_of[static_cast<std::size_t>(target)] != sg.id) return;
        discovery::register_node(sg.registry, topo.subgrids[static_cast<std::size_t>(sg.id)], describe(n));
        registry_changed(sg.id);
        send(target, n, MsgType::RegisterAck, -1, -1, 0.0, [this, n, target] {
            NodeState& s = node(n);
            if (s.registered) return;
            s.registered = true;
            s.cached_sp = target;
            sim.cancel(s.register_timer);
            sim.cancel(s.rediscover_timer);
            registrations.push_back({n, target, sim.now(), s.multicasts});
        });
    });
    ns.register_timer = timer(cfg.register_timeout, TimerType::RegisterTimeout, n, -1, 0.0, [this, n] {
        if (!node(n).registered && reachable(n)) multicast(n);
    });
}

void GridRuntime::Impl::multicast(NodeId n) {
    NodeState& ns = node(n);
    ++ns.multicasts;
    // One datagram reaches the whole sub-grid; it lands when the farthest
    // member would receive it.
    double reach = 0.0;
    for (NodeId m : subgrid_of_node(n).members) reach = std::max(reach, delay(n, m, cfg.message_bytes));
    sim.schedule_in(reach, EventKind::MessageDelivery,
                    sim::MessagePayload{MsgType::Multicast, sim::Tier::Intra, n, kNoNode, -1, -1, false},
                    [this, n](sim::Event&) { on_multicast(n); });
    const double backoff = cfg.rediscover_timeout * std::ldexp(1.0, ns.rediscover_attempt);
    ns.rediscover_timer = timer(backoff, TimerType::RediscoverTimeout, n, -1, ns.rediscover_attempt, [this, n] {
        NodeState& s = node(n);
        if (s.registered || !reachable(n)) return;
        if (++s.rediscover_attempt > cfg.rediscover_max_retries) {
            self_elect(n);
        } else {
            multicast(n);
        }
    });
}

void GridRuntime::Impl::on_multicast(NodeId n) {
    SubgridState& sg = subgrid_of_node(n);
    const NodeId leader = sg.leader;
    if (leader != kNoNode && leader != n && reachable(leader) && !sg.regenerating) {
        announce_leader(sg.id, n);
    } else if (sg.election >= 0 || sg.regenerating) {
        sg.waiting_discoverers.push_back(n);
    }
}

void GridRuntime::Impl::announce_leader(SubgridId sg, NodeId to) {
    const NodeId leader = subgrids[static_cast<std::size_t>(sg)].leader;
    send(leader, to, MsgType::MulticastReply, -1, -1, 0.0, [this, to, leader] {
        NodeState& ns = node(to);
        if (ns.registered) return;
        sim.cancel(ns.rediscover_timer);
        send_register(to, leader);
    });
}

void GridRuntime::Impl::self_elect(NodeId n) {
    SubgridState& sg = subgrid_of_node(n);
    NodeState& ns = node(n);
    if (sg.leader != kNoNode && sg.leader != n && reachable(sg.leader)) {
        send_register(n, sg.leader);
        return;
    }
    sg.leader = n;
    sg.registry = discovery::Registry(sg.id, n);
    sg.registry.upsert(describe(n));
    elections.push_back({false, sg.id, sim.now(), sim.now(), n, 0, true});
    timer(0.0, TimerType::Leader, n, -1, sg.id, [] {});
    ns.registered = true;
    ns.cached_sp = n;
    registrations.push_back({n, n, sim.now(), ns.multicasts});
    registry_changed(sg.id);
    ensure_region_peer(sg.region);
    kick_broker(sg.id);
}

// ---------------------------------------------------------------------------
// Registry shares and cumulative power

std::vector<std::pair<NodeId, HeldShare>> GridRuntime::Impl::encode_shares(SubgridId id) {
    SubgridState& sg = subgrids[static_cast<std::size_t>(id)];
    std::vector<NodeId> candidates;
    for (const auto& [m, entry] : sg.registry.entries())
        if (!entry.stale && m != sg.leader) candidates.push_back(m);
    std::sort(candidates.begin(), candidates.end(),
              [this](NodeId a, NodeId b) { return model::ranks_below(spec(b), spec(a)); });
    const auto params = resilience::ErasureParams::scaled_for(static_cast<int>(candidates.size()), cfg.erasure);
    sg.holders.assign(candidates.begin(), candidates.begin() + params.n);
    std::vector<std::pair<NodeId, HeldShare>> out;
    if (params.n == 0) return out;
    auto shares = resilience::encode_registry(sg.registry, params);
    for (int i = 0; i < params.n; ++i)
        out.emplace_back(sg.holders[static_cast<std::size_t>(i)],
                         HeldShare{params, std::move(shares[static_cast<std::size_t>(i)])});
    return out;
}

void GridRuntime::Impl::registry_changed(SubgridId id) {
    SubgridState& sg = subgrids[static_cast<std::size_t>(id)];
    const NodeId leader = sg.leader;
    if (leader == kNoNode) return;
    for (auto& [holder, held] : encode_shares(id)) {
        const double bytes = static_cast<double>(held.share.payload.size());
        send(leader, holder, MsgType::SharePush, static_cast<std::int64_t>(sg.registry.version()), -1, bytes,
             [this, h = holder, held = std::move(held)] {
                 auto& mine = node(h).share;
                 if (!mine || mine->share.registry_version <= held.share.registry_version) mine = held;
             });
    }
    push_power(id);
}

void GridRuntime::Impl::push_power(SubgridId id) {
    SubgridState& sg = subgrids[static_cast<std::size_t>(id)];
    RegionState& region = region_of(sg);
    const NodeId peer = region.peer;
    if (peer == kNoNode || sg.leader == kNoNode) return;
    const auto power = discovery::aggregate_power(sg.registry);
    if (peer == sg.leader) {
        region.power[id] = power;
        return;
    }
    const RegionId r = region.id;
    send(sg.leader, peer, MsgType::PowerPush, id, -1, 0.0, [this, r, id, peer, power] {
        RegionState& reg = regions[static_cast<std::size_t>(r)];
        if (reg.peer == peer) reg.power[id] = power;
    });
}

// ---------------------------------------------------------------------------
// Elections and regeneration

void GridRuntime::Impl::start_election(bool region, int group, NodeId failed) {
    std::vector<model::NodeSpec> participants;
    if (!region) {
        for (NodeId m : subgrids[static_cast<std::size_t>(group)].members)
            if (m != failed && reachable(m)) participants.push_back(spec(m));
    } else {
        for (SubgridId s : regions[static_cast<std::size_t>(group)].subgrids) {
            const NodeId leader = subgrids[static_cast<std::size_t>(s)].leader;
            if (leader != kNoNode && leader != failed && reachable(leader)) participants.push_back(spec(leader));
        }
    }
    if (participants.empty()) return;  // the group dissolved

    const std::int64_t id = next_election++;
    ElectionCtx ctx;
    ctx.region = region;
    ctx.group = group;
    ctx.record = elections.size();
    elections.push_back({region, group, sim.now(), 0.0, kNoNode, 0, false});

    resilience::BullyElection::Hooks hooks;
    hooks.send = [this, id, region](NodeId from, NodeId to, MsgType type) {
        send(from, to, type, id, -1, 0.0, [this, id, region, from, to, type] {
            auto it = election_ctx.find(id);
            if (it == election_ctx.end()) return;
            if (type == MsgType::Coordinator && !region) node(to).cached_sp = from;
            it->second.algo->on_message(to, from, type);
        });
    };
    hooks.arm_timer = [this, id](NodeId n, double delay, std::uint64_t token) {
        timer(delay, TimerType::ElectionTimeout, n, id, static_cast<double>(token), [this, id, n, token] {
            if (!reachable(n)) return;
            auto it = election_ctx.find(id);
            if (it != election_ctx.end()) it->second.algo->on_timeout(n, token);
        });
    };
    hooks.on_leader = [this, id](NodeId leader) { on_election_leader(id, leader); };

    ctx.algo = std::make_unique<resilience::BullyElection>(id, participants, cfg.election_round, std::move(hooks));
    auto* algo = ctx.algo.get();
    election_ctx.emplace(id, std::move(ctx));
    if (region) {
        regions[static_cast<std::size_t>(group)].election = id;
    } else {
        subgrids[static_cast<std::size_t>(group)].election = id;
    }
    for (const auto& p : participants) algo->start(p.node_id);
}

void GridRuntime::Impl::on_election_leader(std::int64_t id, NodeId leader) {
    ElectionCtx& ctx = election_ctx.at(id);
    ElectionRecord& rec = elections[ctx.record];
    rec.finished = sim.now();
    rec.leader = leader;
    rec.messages = ctx.algo->messages_sent();
    timer(0.0, TimerType::Leader, leader, id, ctx.group, [] {});
    if (!ctx.region) {
        install_subgrid_leader(ctx.group, leader);
        return;
    }
    RegionState& region = regions[static_cast<std::size_t>(ctx.group)];
    region.peer = leader;
    region.election = -1;
    region.power.clear();
    for (SubgridId s : region.subgrids) {
        const SubgridState& sg = subgrids[static_cast<std::size_t>(s)];
        if (sg.leader != kNoNode && reachable(sg.leader) && !sg.regenerating) push_power(s);
    }
}

void GridRuntime::Impl::install_subgrid_leader(SubgridId id, NodeId leader) {
    SubgridState& sg = subgrids[static_cast<std::size_t>(id)];
    if (sg.leader == leader) return;
    sg.leader = leader;
    node(leader).cached_sp = leader;
    node(leader).registered = true;
    sg.regenerating = true;
    sg.collected.clear();
    sg.collected_params.clear();

    // Collect shares from every member; the window covers the slowest
    // request/response pair.
    double window = cfg.election_round;
    for (NodeId m : sg.members) {
        if (m == leader) continue;
        const auto& held = node(m).share;
        const double bytes = held ? static_cast<double>(held->share.payload.size()) : 0.0;
        window = std::max(window, delay(leader, m, cfg.message_bytes) +
                                      delay(m, leader, cfg.message_bytes + bytes) + 1e-3);
        send(leader, m, MsgType::ShareRequest, id, -1, 0.0, [this, id, m, leader] {
            const auto& mine = node(m).share;
            if (!mine) return;
            send(m, leader, MsgType::ShareResponse, id, -1, static_cast<double>(mine->share.payload.size()),
                 [this, id, leader, held = *mine] {
                     SubgridState& s = subgrids[static_cast<std::size_t>(id)];
                     if (!s.regenerating || s.leader != leader) return;
                     s.collected.push_back(held.share);
                     s.collected_params.push_back(held.params);
                 });
        });
    }
    timer(window, TimerType::RegistryRegenerated, leader, id, 0.0, [this, id, leader] {
        SubgridState& s = subgrids[static_cast<std::size_t>(id)];
        if (s.leader == leader && s.regenerating) finish_regeneration(id);
    });
}

void GridRuntime::Impl::finish_regeneration(SubgridId id) {
    SubgridState& sg = subgrids[static_cast<std::size_t>(id)];
    const NodeId leader = sg.leader;
    std::vector<resilience::Share> shares = sg.collected;
    std::vector<resilience::ErasureParams> params = sg.collected_params;
    if (const auto& own = node(leader).share) {
        shares.push_back(own->share);
        params.push_back(own->params);
    }

    // Highest version that still has enough intact shares wins.
    std::map<std::uint64_t, std::vector<std::size_t>, std::greater<>> by_version;
    for (std::size_t i = 0; i < shares.size(); ++i) by_version[shares[i].registry_version].push_back(i);
    RegenerationRecord rec;
    rec.subgrid = id;
    rec.leader = leader;
    rec.time = sim.now();
    for (const auto& [version, idx] : by_version) {
        const auto& p = params[idx.front()];
        std::vector<resilience::Share> group;
        for (std::size_t i : idx)
            if (params[i] == p) group.push_back(shares[i]);
        if (static_cast<int>(group.size()) < p.k) continue;
        try {
            rec.registry = resilience::decode_registry(group, p);
            rec.decoded = true;
            rec.shares_used = p.k;
            break;
        } catch (const GridError&) {
        }
    }

    if (rec.decoded) {
        sg.registry = rec.registry;
        sg.registry.set_owner(leader);
        if (sg.failed_leader != kNoNode) sg.registry.mark_stale(sg.failed_leader);
        std::vector<NodeId> down;
        for (const auto& [m, entry] : sg.registry.entries())
            if (!entry.stale && !reachable(m)) down.push_back(m);
        for (NodeId m : down) sg.registry.mark_stale(m);
    } else {
        // Nothing recoverable: start an empty registry and ask members back.
        sg.registry = discovery::Registry(id, leader);
        sg.registry.upsert(describe(leader));
    }
    regenerations.push_back(std::move(rec));
    sg.regenerating = false;
    sg.election = -1;
    sg.failed_leader = kNoNode;
    registry_changed(id);

    if (!regenerations.back().decoded) {
        for (NodeId m : sg.members)
            if (m != leader && reachable(m)) {
                node(m).registered = false;
                announce_leader(id, m);
            }
    }
    std::vector<NodeId> waiting;
    waiting.swap(sg.waiting_discoverers);
    for (NodeId d : waiting)
        if (d != leader && reachable(d) && !node(d).registered) announce_leader(id, d);
    ensure_region_peer(sg.region);
    kick_broker(id);
}

void GridRuntime::Impl::ensure_region_peer(RegionId r) {
    RegionState& region = regions[static_cast<std::size_t>(r)];
    if (region.peer == kNoNode && region.election < 0) start_election(true, r, kNoNode);
}

// ---------------------------------------------------------------------------
// Resource queries

void GridRuntime::Impl::start_query(std::int64_t id, NodeId origin) {
    if (!reachable(origin)) {
        resolve_query(id, kNoNode, {}, -1);
        return;
    }
    const NodeId sp = node(origin).cached_sp;
    if (sp == kNoNode) {
        resolve_query(id, kNoNode, {}, -1);
        return;
    }
    if (sp == origin) {
        query_at_superpeer(id, sp, false);
        return;
    }
    send(origin, sp, MsgType::Query, id, -1, 0.0, [this, id, sp] { query_at_superpeer(id, sp, false); },
         [this, id] { resolve_query(id, kNoNode, {}, -1); });
}

void GridRuntime::Impl::query_at_superpeer(std::int64_t id, NodeId sp, bool dispatched) {
    QueryState& q = queries.at(id);
    q.outcome.message.record(q.stage, sp);
    SubgridState& sg = subgrid_of_node(sp);
    const auto& constraint = q.outcome.message.constraint;
    std::vector<NodeId> matches;
    if (sg.leader == sp && !sg.regenerating) matches = sg.registry.match(constraint);
    if (static_cast<int>(matches.size()) >= constraint.count) {
        resolve_query(id, sp, std::move(matches), sg.id);
        return;
    }
    if (!dispatched) {
        q.stage = discovery::Stage::Region;
        q.current_region = sg.region;
        q.tried.insert(q.origin_subgrid);
        q.remaining = discovery::inter_region_order(sg.region, static_cast<int>(regions.size()));
        const RegionId r = sg.region;
        const NodeId rp = regions[static_cast<std::size_t>(r)].peer;
        if (rp == kNoNode) {
            resolve_query(id, sp, {}, -1);
        } else if (rp == sp) {
            query_at_region(id, r);
        } else {
            send(sp, rp, MsgType::Forward, id, -1, 0.0, [this, id, r] { query_at_region(id, r); },
                 [this, id, sp] { resolve_query(id, sp, {}, -1); });
        }
        return;
    }
    const RegionId r = q.current_region;
    const NodeId rp = regions[static_cast<std::size_t>(r)].peer;
    if (rp == sp) {
        region_step(id, r);
    } else {
        send(sp, rp, MsgType::Decline, id, -1, 0.0, [this, id, r] { region_step(id, r); });
    }
}

void GridRuntime::Impl::query_at_region(std::int64_t id, RegionId r) {
    QueryState& q = queries.at(id);
    ++q.outcome.region_visits[r];
    q.outcome.message.record(q.stage, regions[static_cast<std::size_t>(r)].peer);
    region_step(id, r);
}

void GridRuntime::Impl::region_step(std::int64_t id, RegionId r) {
    QueryState& q = queries.at(id);
    if (q.outcome.status != QueryOutcome::Status::Pending) return;
    RegionState& region = regions[static_cast<std::size_t>(r)];
    const NodeId rp = region.peer;
    const auto& constraint = q.outcome.message.constraint;
    for (;;) {
        const auto decision = discovery::region_dispatch(region.power, constraint, q.tried);
        const auto* target = std::get_if<SubgridId>(&decision);
        if (!target) break;
        q.tried.insert(*target);
        const NodeId sp = subgrids[static_cast<std::size_t>(*target)].leader;
        if (sp == kNoNode) continue;
        if (sp == rp) {
            query_at_superpeer(id, sp, true);
        } else {
            send(rp, sp, MsgType::Dispatch, id, -1, 0.0, [this, id, sp] { query_at_superpeer(id, sp, true); },
                 [this, id, r] { region_step(id, r); });
        }
        return;
    }
    while (!q.remaining.empty()) {
        const RegionId next = q.remaining.front();
        q.remaining.erase(q.remaining.begin());
        const NodeId next_peer = regions[static_cast<std::size_t>(next)].peer;
        if (next_peer == kNoNode) continue;
        q.stage = discovery::Stage::InterRegion;
        q.current_region = next;
        send(rp, next_peer, MsgType::Forward, id, -1, 0.0, [this, id, next] { query_at_region(id, next); },
             [this, id, next] { region_step(id, next); });
        return;
    }
    resolve_query(id, rp, {}, -1);
}

void GridRuntime::Impl::resolve_query(std::int64_t id, NodeId responder, std::vector<NodeId> matches,
                                      SubgridId found_in) {
    QueryState& q = queries.at(id);
    if (q.outcome.status != QueryOutcome::Status::Pending) return;
    const NodeId origin = q.outcome.message.origin;
    auto finish = [this, id, matches, found_in] {
        QueryState& qs = queries.at(id);
        if (qs.outcome.status != QueryOutcome::Status::Pending) return;
        const bool found = static_cast<int>(matches.size()) >= qs.outcome.message.constraint.count;
        qs.outcome.status = found ? QueryOutcome::Status::Found : QueryOutcome::Status::NotFound;
        qs.outcome.matches = found ? matches : std::vector<NodeId>{};
        qs.outcome.found_in = found ? found_in : -1;
        qs.outcome.resolved_at = sim.now();
    };
    if (responder == kNoNode || responder == origin) {
        finish();
    } else {
        send(responder, origin, MsgType::Result, id, -1, 0.0, finish, finish);
    }
}

}  // namespace gridsim::runtime
