#include "gridsim/resilience/election.hpp"

#include <algorithm>

#include "gridsim/model/types.hpp"

namespace gridsim::resilience {

namespace {

std::optional<NodeId> best_of(std::span<const model::NodeSpec> nodes) {
    const model::NodeSpec* best = nullptr;
    for (const auto& n : nodes)
        if (!best || model::ranks_below(*best, n)) best = &n;
    if (!best) return std::nullopt;
    return best->node_id;
}

}  // namespace

std::optional<NodeId> elect_superpeer(std::span<const model::NodeSpec> live_members) {
    return best_of(live_members);
}

std::optional<NodeId> elect_regionpeer(std::span<const model::NodeSpec> live_superpeers) {
    return best_of(live_superpeers);
}

BullyElection::BullyElection(std::int64_t epoch, std::vector<model::NodeSpec> participants, double round,
                             Hooks hooks)
    : epoch_(epoch), round_(round), hooks_(std::move(hooks)) {
    for (auto& p : participants) { const NodeId id = p.node_id; state_[id] = Peer{std::move(p), State::Idle, std::nullopt, 0}; }
}

bool BullyElection::outranks(NodeId a, NodeId b) const {
    return model::ranks_below(state_.at(b).spec, state_.at(a).spec);
}

void BullyElection::send(NodeId from, NodeId to, sim::MsgType type) {
    ++messages_;
    hooks_.send(from, to, type);
}

void BullyElection::start(NodeId node) {
    auto it = state_.find(node);
    if (it == state_.end()) return;
    Peer& peer = it->second;
    if (peer.state == State::Electing || peer.state == State::Waiting) return;
    peer.state = State::Electing;
    peer.leader.reset();
    const std::uint64_t token = ++peer.token;
    bool any_higher = false;
    for (const auto& [id, other] : state_) {
        if (id == node || !outranks(id, node)) continue;
        any_higher = true;
        send(node, id, sim::MsgType::Election);
    }
    if (!any_higher) {
        become_leader(node);
        return;
    }
    hooks_.arm_timer(node, round_, token);
}

void BullyElection::on_message(NodeId to, NodeId from, sim::MsgType type) {
    auto it = state_.find(to);
    if (it == state_.end() || !state_.count(from)) return;
    Peer& peer = it->second;
    switch (type) {
        case sim::MsgType::Election:
            if (!outranks(to, from)) return;
            send(to, from, sim::MsgType::Answer);
            if (peer.state == State::Done) {
                // Settled: the sender also asked the leader, which answers with
                // Coordinator. Restarting here would cascade through the group.
                if (peer.leader == to) send(to, from, sim::MsgType::Coordinator);
                return;
            }
            start(to);
            return;
        case sim::MsgType::Answer:
            if (peer.state != State::Electing) return;
            peer.state = State::Waiting;
            hooks_.arm_timer(to, 2.0 * round_, ++peer.token);
            return;
        case sim::MsgType::Coordinator:
            if (outranks(to, from)) {
                // A lower node claimed leadership while we are alive.
                if (peer.state == State::Done) peer.state = State::Idle;
                start(to);
                return;
            }
            peer.state = State::Done;
            peer.leader = from;
            ++peer.token;
            return;
        default:
            return;
    }
}

void BullyElection::on_timeout(NodeId node, std::uint64_t token) {
    auto it = state_.find(node);
    if (it == state_.end() || it->second.token != token) return;
    Peer& peer = it->second;
    if (peer.state == State::Electing) {
        become_leader(node);
    } else if (peer.state == State::Waiting) {
        // The higher node that answered never announced itself.
        peer.state = State::Idle;
        start(node);
    }
}

void BullyElection::become_leader(NodeId node) {
    Peer& peer = state_.at(node);
    peer.state = State::Done;
    peer.leader = node;
    ++peer.token;
    for (const auto& [id, other] : state_)
        if (id != node && outranks(node, id)) send(node, id, sim::MsgType::Coordinator);
    leader_ = node;
    if (hooks_.on_leader) hooks_.on_leader(node);
}

std::optional<NodeId> BullyElection::view(NodeId node) const {
    auto it = state_.find(node);
    if (it == state_.end()) return std::nullopt;
    return it->second.leader;
}

}  // namespace gridsim::resilience
