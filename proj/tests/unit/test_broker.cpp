#include <gtest/gtest.h>

#include <limits>
#include <map>

#include "gridsim/broker/poll.hpp"
#include "gridsim/broker/policy.hpp"
#include "gridsim/error.hpp"
#include "gridsim/rng.hpp"

using namespace gridsim;
using namespace gridsim::broker;

namespace {

Bid bid(NodeId id, double capability, double bandwidth, double rtt = 0.0, int running = 0, double share = 1.0) {
    Bid b;
    b.description.node_id = id;
    b.description.capability = capability;
    b.description.owner_share = share;
    b.description.running_jobs = running;
    b.description.free_storage = 1e12;
    b.measured_bandwidth = bandwidth;
    b.measured_rtt = rtt;
    return b;
}

model::Job job(double flop, double bytes) {
    model::Job j;
    j.flop_demand = flop;
    j.byte_demand = bytes;
    return j;
}

Bid random_bid(Rng& gen, NodeId id) {
    return bid(id, gen.uniform(1e4, 1e8), gen.uniform(5.6e4, 8e7), gen.uniform(0.0, 0.2),
               static_cast<int>(gen.below(5)), gen.uniform(0.1, 1.0));
}

// Reference: evaluate the completion formula directly and scan.
NodeId brute_force_argmin(const model::Job& j, const std::vector<Bid>& bids) {
    NodeId best = kNoNode;
    double best_t = std::numeric_limits<double>::infinity();
    for (const auto& b : bids) {
        const auto& d = b.description;
        double t = b.measured_rtt + j.byte_demand * 8.0 / b.measured_bandwidth +
                   j.flop_demand / (d.capability * d.owner_share / (1.0 + d.running_jobs));
        if (t < best_t || (t == best_t && d.node_id < best)) {
            best_t = t;
            best = d.node_id;
        }
    }
    return best;
}

}  // namespace

TEST(Estimate, HybridOracles) {
    auto hybrid = job(1e9, 1e9);
    EXPECT_DOUBLE_EQ(estimate_completion(hybrid, bid(0, 1e8, 8e6)), 1010.0);
    EXPECT_DOUBLE_EQ(estimate_completion(hybrid, bid(1, 1e7, 8e7)), 200.0);
    EXPECT_DOUBLE_EQ(estimate_completion(job(1e9, 0), bid(0, 1e8, 8e6, 0.5)), 10.5);
    EXPECT_DOUBLE_EQ(estimate_completion(job(1e9, 0), bid(0, 1e8, 8e6, 0.0, 1, 0.5)), 40.0);
}

TEST(Select, NcdaAndFlopsDisagreeOnHybrid) {
    std::vector<Bid> bids = {bid(0, 1e8, 8e6), bid(1, 1e7, 8e7)};
    auto hybrid = job(1e9, 1e9);
    EXPECT_EQ(ncda_select(hybrid, bids), 1);
    EXPECT_EQ(flops_select(hybrid, bids), 0);
}

TEST(Select, SingleBidAndTies) {
    std::vector<Bid> one = {bid(7, 1e6, 1e6)};
    PolicyState rr{PolicyKind::RoundRobin};
    EXPECT_EQ(ncda_select(job(1e9, 1e9), one), 7);
    EXPECT_EQ(flops_select(job(1e9, 1e9), one), 7);
    EXPECT_EQ(round_robin_select(rr, one), 7);

    std::vector<Bid> same = {bid(4, 1e7, 1e7), bid(2, 1e7, 1e7), bid(9, 1e7, 1e7)};
    EXPECT_EQ(ncda_select(job(1e9, 1e9), same), 2);
    EXPECT_EQ(flops_select(job(1e9, 1e9), same), 2);
}

TEST(Select, EmptyBidsHaveNoCandidate) {
    std::vector<Bid> none;
    PolicyState state;
    EXPECT_THROW(ncda_select(job(1, 1), none), NoCandidate);
    EXPECT_THROW(flops_select(job(1, 1), none), NoCandidate);
    EXPECT_THROW(round_robin_select(state, none), NoCandidate);
    EXPECT_THROW(select(state, job(1, 1), none), NoCandidate);
}

TEST(Select, FlopsIgnoresNetworkAndUsesShare) {
    std::vector<Bid> bids = {bid(0, 1e8, 8e6), bid(1, 1e7, 8e7)};
    EXPECT_EQ(flops_select(job(0, 1e9), bids), 0);
    std::vector<Bid> shares = {bid(0, 1e7, 1e7, 0, 0, 0.5), bid(1, 1e7, 1e7, 0, 0, 1.0)};
    EXPECT_EQ(flops_select(job(1e9, 0), shares), 1);
}

TEST(Select, RoundRobinCycles) {
    std::vector<Bid> bids = {bid(0, 1, 1), bid(1, 1, 1), bid(2, 1, 1)};
    PolicyState s{PolicyKind::RoundRobin};
    std::vector<NodeId> got;
    for (int i = 0; i < 4; ++i) got.push_back(round_robin_select(s, bids));
    EXPECT_EQ(got, (std::vector<NodeId>{0, 1, 2, 0}));
}

TEST(Select, RoundRobinSpreadsEvenly) {
    std::vector<Bid> bids;
    for (NodeId i = 0; i < 10; ++i) bids.push_back(bid(i, 1e7, 1e7));
    PolicyState s{PolicyKind::RoundRobin};
    std::map<NodeId, int> count;
    for (int i = 0; i < 1000; ++i) ++count[select(s, job(1e9, 0), bids)];
    for (NodeId i = 0; i < 10; ++i) EXPECT_EQ(count[i], 100);
}

TEST(Policy, Names) {
    for (auto k : {PolicyKind::Ncda, PolicyKind::Flops, PolicyKind::RoundRobin})
        EXPECT_EQ(policy_from_string(to_string(k)), k);
    EXPECT_THROW(policy_from_string("random"), InvalidSpec);
    EXPECT_TRUE(needs_bandwidth_probe(PolicyKind::Ncda));
    EXPECT_FALSE(needs_bandwidth_probe(PolicyKind::Flops));
}

// Property: NCDA agrees with an exhaustive scan on random bid sets.
TEST(Select, NcdaMatchesExhaustiveArgmin) {
    Rng gen(404);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(gen.below(10));
        std::vector<Bid> bids;
        for (int i = 0; i < n; ++i) bids.push_back(random_bid(gen, static_cast<NodeId>(gen.below(1000))));
        const double flop = gen.below(3) == 0 ? 0.0 : 1e9;
        const double bytes = flop == 0.0 || gen.below(2) == 0 ? 1e9 : 0.0;
        auto j = job(flop, bytes);
        EXPECT_EQ(ncda_select(j, bids), brute_force_argmin(j, bids)) << "trial " << trial;
    }
}

// Property: scaling every capability by a common factor keeps the FLOPS choice.
TEST(Select, FlopsScaleInvariant) {
    Rng gen(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Bid> bids;
        const int n = 1 + static_cast<int>(gen.below(10));
        for (int i = 0; i < n; ++i) bids.push_back(random_bid(gen, i));
        auto chosen = flops_select(job(1e9, 0), bids);
        const double factor = gen.uniform(0.01, 100.0);
        for (auto& b : bids) b.description.capability *= factor;
        EXPECT_EQ(flops_select(job(1e9, 0), bids), chosen);
    }
}

// Property: with a uniform network and no data, NCDA reduces to FLOPS-rank.
TEST(Select, NcdaEqualsFlopsWithoutNetworkDifferences) {
    Rng gen(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Bid> bids;
        const int n = 1 + static_cast<int>(gen.below(10));
        for (int i = 0; i < n; ++i) {
            auto b = random_bid(gen, i);
            b.measured_bandwidth = 1e7;
            b.measured_rtt = 0.01;
            bids.push_back(b);
        }
        EXPECT_EQ(ncda_select(job(1e9, 0), bids), flops_select(job(1e9, 0), bids));
    }
}

TEST(PollRound, CompletesWhenEveryMemberAnswers) {
    PollRound round(1, 5, 0, 0, {0, 3, 7});
    EXPECT_FALSE(round.add_response(bid(7, 1, 1)));
    EXPECT_FALSE(round.add_response(bid(0, 1, 1)));
    EXPECT_EQ(round.unanswered(), 1u);
    EXPECT_TRUE(round.add_response(bid(3, 1, 1)));
    EXPECT_TRUE(round.complete());
    auto bids = round.sorted_bids();
    ASSERT_EQ(bids.size(), 3u);
    EXPECT_EQ(bids[0].node_id(), 0);
    EXPECT_EQ(bids[1].node_id(), 3);
    EXPECT_EQ(bids[2].node_id(), 7);
}
