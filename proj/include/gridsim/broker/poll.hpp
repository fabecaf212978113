#pragma once

#include <cstdint>
#include <vector>

#include "gridsim/broker/policy.hpp"

namespace gridsim::broker {

/// Bookkeeping for one sub-grid poll: one request per member, one response
/// per live member. The round closes when every member answered or the
/// timeout fires, whichever comes first.
class PollRound {
public:
    PollRound(std::int64_t decision_id, JobId job, NodeId requester, SubgridId subgrid,
              std::vector<NodeId> members);

    std::int64_t decision_id() const { return decision_id_; }
    JobId job() const { return job_; }
    NodeId requester() const { return requester_; }
    SubgridId subgrid() const { return subgrid_; }
    const std::vector<NodeId>& members() const { return members_; }

    /// Records a response; returns true when it completes the round.
    bool add_response(Bid bid);
    void close() { closed_ = true; }

    bool closed() const { return closed_; }
    bool complete() const { return bids_.size() == members_.size(); }
    std::size_t unanswered() const { return members_.size() - bids_.size(); }

    /// Received bids sorted by node_id.
    std::vector<Bid> sorted_bids() const;

private:
    std::int64_t decision_id_;
    JobId job_;
    NodeId requester_;
    SubgridId subgrid_;
    std::vector<NodeId> members_;
    std::vector<Bid> bids_;
    bool closed_ = false;
};

}  // namespace gridsim::broker
