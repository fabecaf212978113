#include "gridsim/broker/policy.hpp"

#include <string>

#include "gridsim/error.hpp"

namespace gridsim::broker {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Ncda: return "ncda";
        case PolicyKind::Flops: return "flops";
        case PolicyKind::RoundRobin: return "rr";
    }
    return "unknown";
}

PolicyKind policy_from_string(std::string_view name) {
    if (name == "ncda") return PolicyKind::Ncda;
    if (name == "flops") return PolicyKind::Flops;
    if (name == "rr") return PolicyKind::RoundRobin;
    throw InvalidSpec("unknown policy '" + std::string(name) + "' (expected ncda, flops or rr)");
}

double estimate_completion(const model::Job& job, const Bid& bid) {
    double t = bid.measured_rtt;
    if (job.byte_demand > 0.0) t += job.byte_demand * 8.0 / bid.measured_bandwidth;
    if (job.flop_demand > 0.0) t += job.flop_demand / bid.description.effective_rate();
    return t;
}

namespace {

void require_bids(std::span<const Bid> bids) {
    if (bids.empty()) throw NoCandidate("no bids to select from");
}

}  // namespace

NodeId ncda_select(const model::Job& job, std::span<const Bid> bids) {
    require_bids(bids);
    const Bid* best = nullptr;
    double best_t = 0.0;
    for (const auto& bid : bids) {
        double t = estimate_completion(job, bid);
        if (!best || t < best_t || (t == best_t && bid.node_id() < best->node_id())) {
            best = &bid;
            best_t = t;
        }
    }
    return best->node_id();
}

NodeId flops_select(const model::Job&, std::span<const Bid> bids) {
    require_bids(bids);
    const Bid* best = nullptr;
    double best_rate = 0.0;
    for (const auto& bid : bids) {
        double rate = bid.description.effective_rate();
        if (!best || rate > best_rate || (rate == best_rate && bid.node_id() < best->node_id())) {
            best = &bid;
            best_rate = rate;
        }
    }
    return best->node_id();
}

NodeId round_robin_select(PolicyState& state, std::span<const Bid> bids) {
    require_bids(bids);
    const std::size_t i = state.rr_cursor % bids.size();
    state.rr_cursor = (i + 1) % bids.size();
    return bids[i].node_id();
}

NodeId select(PolicyState& state, const model::Job& job, std::span<const Bid> bids) {
    switch (state.kind) {
        case PolicyKind::Ncda: return ncda_select(job, bids);
        case PolicyKind::Flops: return flops_select(job, bids);
        case PolicyKind::RoundRobin: return round_robin_select(state, bids);
    }
    throw NoCandidate("unknown policy");
}

}  // namespace gridsim::broker
