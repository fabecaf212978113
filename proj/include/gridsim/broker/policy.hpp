#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "gridsim/model/types.hpp"

namespace gridsim::broker {

/// A node's advertised capability and load, as returned to a poll.
struct ResourceDescription {
    NodeId node_id = kNoNode;
    double capability = 0.0;
    double owner_share = 1.0;
    int running_jobs = 0;
    double free_storage = 0.0;
    double timestamp = 0.0;

    /// Rate a newly placed job would receive under processor sharing.
    double effective_rate() const { return capability * owner_share / (1.0 + running_jobs); }

    friend bool operator==(const ResourceDescription&, const ResourceDescription&) = default;
};

struct Bid {
    ResourceDescription description;
    double measured_bandwidth = 0.0;  // bit/s, requester to bidder
    double measured_rtt = 0.0;        // s

    NodeId node_id() const { return description.node_id; }
};

enum class PolicyKind { Ncda, Flops, RoundRobin };

std::string_view to_string(PolicyKind kind);
/// Accepts "ncda", "flops", "rr"; throws InvalidSpec otherwise.
PolicyKind policy_from_string(std::string_view name);

/// Only NCDA asks bidders to measure bandwidth back to the requester.
inline bool needs_bandwidth_probe(PolicyKind kind) { return kind == PolicyKind::Ncda; }

struct PolicyState {
    PolicyKind kind = PolicyKind::Ncda;
    std::size_t rr_cursor = 0;
};

/// rtt + transfer of the job's bytes + processor-shared compute.
double estimate_completion(const model::Job& job, const Bid& bid);

/// Argmin of estimate_completion; ties to the lower node_id.
NodeId ncda_select(const model::Job& job, std::span<const Bid> bids);

/// Argmax of the load-adjusted rate; ignores the network. Ties to the lower node_id.
NodeId flops_select(const model::Job& job, std::span<const Bid> bids);

/// bids[cursor mod |bids|], then advances the cursor. Bids must be sorted by node_id.
NodeId round_robin_select(PolicyState& state, std::span<const Bid> bids);

/// Dispatches on state.kind. All selectors throw NoCandidate on empty bids.
NodeId select(PolicyState& state, const model::Job& job, std::span<const Bid> bids);

}  // namespace gridsim::broker
