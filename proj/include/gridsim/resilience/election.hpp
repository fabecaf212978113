#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gridsim/model/types.hpp"
#include "gridsim/sim/trace.hpp"

namespace gridsim::resilience {

/// Live member with the largest (availability, node_id); nullopt when the
/// set is empty (the group dissolved).
std::optional<NodeId> elect_superpeer(std::span<const model::NodeSpec> live_members);

/// Same rule applied to a region's surviving super-peers.
std::optional<NodeId> elect_regionpeer(std::span<const model::NodeSpec> live_superpeers);

/// Message-driven bully election keyed on (availability, node_id).
///
/// A starter sends Election to every higher-ranked participant and waits
/// one round. Receivers answer and start their own election. A node that
/// hears no Answer within the round declares itself leader and sends
/// Coordinator to every lower-ranked participant. Message count is O(m^2).
class BullyElection {
public:
    struct Hooks {
        std::function<void(NodeId from, NodeId to, sim::MsgType type)> send;
        /// Arms a timeout for `node`; the host calls on_timeout(node, token)
        /// after `delay` seconds.
        std::function<void(NodeId node, double delay, std::uint64_t token)> arm_timer;
        std::function<void(NodeId leader)> on_leader;
    };

    BullyElection(std::int64_t epoch, std::vector<model::NodeSpec> participants, double round,
                  Hooks hooks);

    std::int64_t epoch() const { return epoch_; }

    void start(NodeId node);
    void on_message(NodeId to, NodeId from, sim::MsgType type);
    void on_timeout(NodeId node, std::uint64_t token);

    /// Leader as currently seen by `node`.
    std::optional<NodeId> view(NodeId node) const;
    std::optional<NodeId> leader() const { return leader_; }
    std::uint64_t messages_sent() const { return messages_; }
    bool involves(NodeId node) const { return state_.count(node) != 0; }

private:
    enum class State { Idle, Electing, Waiting, Done };
    struct Peer {
        model::NodeSpec spec;
        State state = State::Idle;
        std::optional<NodeId> leader;
        std::uint64_t token = 0;
    };

    void send(NodeId from, NodeId to, sim::MsgType type);
    void become_leader(NodeId node);
    bool outranks(NodeId a, NodeId b) const;

    std::int64_t epoch_;
    double round_;
    Hooks hooks_;
    std::map<NodeId, Peer> state_;
    std::optional<NodeId> leader_;
    std::uint64_t messages_ = 0;
};

}  // namespace gridsim::resilience
