#include "gridsim/broker/poll.hpp"

#include <algorithm>

namespace gridsim::broker {

PollRound::PollRound(std::int64_t decision_id, JobId job, NodeId requester, SubgridId subgrid,
                     std::vector<NodeId> members)
    : decision_id_(decision_id), job_(job), requester_(requester), subgrid_(subgrid), members_(std::move(members)) {}

bool PollRound::add_response(Bid bid) {
    if (closed_) return false;
    bids_.push_back(std::move(bid));
    return complete();
}

std::vector<Bid> PollRound::sorted_bids() const {
    auto out = bids_;
    std::sort(out.begin(), out.end(), [](const Bid& a, const Bid& b) { return a.node_id() < b.node_id(); });
    return out;
}

}  // namespace gridsim::broker
