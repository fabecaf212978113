#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include <json.hpp>

#include "gridsim/error.hpp"
#include "gridsim/sim/failure.hpp"
#include "gridsim/sim/network.hpp"
#include "gridsim/sim/simulator.hpp"
#include "helpers.hpp"

using namespace gridsim;
using namespace gridsim::sim;
using gridsim::testing::link;
using gridsim::testing::node;

TEST(TransferTime, Oracles) {
    std::vector<model::LinkSpec> one = {link(0, 1, 8e7, 0.0)};
    EXPECT_DOUBLE_EQ(transfer_time(1e9, one), 100.0);

    std::vector<model::LinkSpec> two = {link(0, 1, 1e6, 0.01), link(1, 2, 1e7, 0.01)};
    EXPECT_DOUBLE_EQ(transfer_time(0.0, two), 0.02);

    std::vector<model::LinkSpec> modem = {link(0, 1, 5.6e4, 0.0)};
    EXPECT_DOUBLE_EQ(transfer_time(7000.0, modem), 1.0);

    EXPECT_EQ(transfer_time(1e9, std::vector<model::LinkSpec>{}), 0.0);
}

TEST(TransferTime, BottleneckOfPath) {
    std::vector<model::LinkSpec> hops = {link(0, 1, 8e7, 0.001), link(1, 2, 8e6, 0.002)};
    EXPECT_DOUBLE_EQ(transfer_time(1e6, hops), 0.003 + 1.0);
}

TEST(ComputeTime, Oracles) {
    EXPECT_DOUBLE_EQ(compute_time(1e9, node(0, 1e8, 1.0), 0), 10.0);
    EXPECT_DOUBLE_EQ(compute_time(1e9, node(0, 1e4, 1.0), 0), 1e5);
    EXPECT_EQ(compute_time(0.0, node(0, 1e6, 1.0), 3), 0.0);
    auto shared = node(0, 1e8, 1.0);
    shared.owner_share = 0.5;
    EXPECT_DOUBLE_EQ(compute_time(1e9, shared, 1), 40.0);
}

TEST(Routing, ShortestLatencyWithLexicographicTies) {
    // 0-1-3 and 0-2-3 have equal latency; the path through 1 wins.
    auto t = gridsim::testing::build({node(0, 1, 1), node(1, 1, 1), node(2, 1, 1), node(3, 1, 1), node(4, 1, 1)},
                                     {link(0, 1, 1e6, 0.01), link(1, 3, 1e7, 0.01), link(0, 2, 1e8, 0.01),
                                      link(2, 3, 1e8, 0.01)},
                                     1.0, 1.0);
    Routing r(t);
    EXPECT_EQ(r.path(0, 3), (std::vector<NodeId>{0, 1, 3}));
    EXPECT_DOUBLE_EQ(r.metrics(0, 3).latency, 0.02);
    EXPECT_DOUBLE_EQ(r.metrics(0, 3).bandwidth, 1e6);
    EXPECT_EQ(r.metrics(0, 0).hops, 0);
    EXPECT_FALSE(r.reachable(0, 4));
    EXPECT_THROW(r.metrics(0, 4), NoRoute);
}

TEST(Simulator, EmptyRunAdvancesClock) {
    Simulator s;
    const auto& trace = s.run_until(100.0);
    EXPECT_EQ(s.now(), 100.0);
    EXPECT_EQ(trace.size(), 0u);
}

TEST(Simulator, EqualTimesRunInSchedulingOrder) {
    Simulator s;
    std::vector<int> order;
    s.schedule(5.0, EventKind::Timer, TimerPayload{}, [&](Event&) { order.push_back(1); });
    s.schedule(5.0, EventKind::Timer, TimerPayload{}, [&](Event&) { order.push_back(2); });
    s.schedule(1.0, EventKind::Timer, TimerPayload{}, [&](Event&) { order.push_back(0); });
    s.run();
    EXPECT_EQ(order, (std::vector<int>{0, 1, 2}));
    const auto& recs = s.trace().records();
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_LT(recs[1].seq, recs[2].seq);
}

TEST(Simulator, PastSchedulingFailsFast) {
    Simulator s;
    s.run_until(10.0);
    EXPECT_THROW(s.schedule(9.0, EventKind::Timer, TimerPayload{}), std::logic_error);
}

TEST(Simulator, CancelledEventsAreNotTraced) {
    Simulator s;
    bool ran = false;
    auto h = s.schedule(1.0, EventKind::Timer, TimerPayload{}, [&](Event&) { ran = true; });
    s.schedule(2.0, EventKind::NodeFail, NodePayload{3});
    EXPECT_TRUE(s.cancel(h));
    EXPECT_FALSE(s.cancel(h));
    s.run();
    EXPECT_FALSE(ran);
    EXPECT_EQ(s.trace().size(), 1u);
    EXPECT_EQ(s.trace().events(EventKind::NodeFail), 1u);
}

TEST(Simulator, ActionsMayRewritePayloadBeforeTracing) {
    Simulator s;
    s.schedule(1.0, EventKind::MessageDelivery, MessagePayload{MsgType::Query, Tier::Intra, 0, 1},
               [](Event& e) { std::get<MessagePayload>(e.payload).dropped = true; });
    s.run();
    EXPECT_TRUE(std::get<MessagePayload>(s.trace().records()[0].payload).dropped);
}

// Property: random schedules, including events scheduled from actions, are
// processed with a non-decreasing clock and in (time, seq) order.
TEST(Simulator, ClockIsMonotone) {
    Rng gen(77);
    for (int trial = 0; trial < 50; ++trial) {
        Simulator s;
        int budget = 200;
        std::function<void(Event&)> spawn = [&](Event&) {
            if (budget-- > 0) s.schedule_in(gen.uniform(0.0, 3.0), EventKind::Timer, TimerPayload{}, spawn);
        };
        for (int i = 0; i < 20; ++i) s.schedule(gen.uniform(0.0, 10.0), EventKind::Timer, TimerPayload{}, spawn);
        s.run();
        const auto& recs = s.trace().records();
        for (std::size_t i = 1; i < recs.size(); ++i) {
            ASSERT_GE(recs[i].time, recs[i - 1].time);
            if (recs[i].time == recs[i - 1].time) ASSERT_GT(recs[i].seq, recs[i - 1].seq);
        }
    }
}

TEST(Trace, CountersWithoutRecords) {
    Simulator s(false);
    s.schedule(1.0, EventKind::MessageDelivery, MessagePayload{MsgType::Query, Tier::Region, 0, 1});
    s.schedule(2.0, EventKind::MessageDelivery, MessagePayload{MsgType::Result, Tier::Region, 1, 0});
    s.schedule(3.0, EventKind::MessageDelivery, MessagePayload{MsgType::Forward, Tier::Inter, 1, 2});
    s.run();
    EXPECT_TRUE(s.trace().records().empty());
    EXPECT_EQ(s.trace().size(), 3u);
    EXPECT_EQ(s.trace().messages(Tier::Region), 2u);
    EXPECT_EQ(s.trace().messages(Tier::Inter), 1u);
    EXPECT_EQ(s.trace().messages(MsgType::Forward), 1u);
}

TEST(Trace, JsonLines) {
    TraceRecord r;
    r.time = 0.1;
    r.seq = 4;
    r.kind = EventKind::NodeFail;
    r.payload = NodePayload{7};
    auto line = to_json_line(r);
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["time"].get<double>(), 0.1);
    EXPECT_EQ(j["seq"].get<int>(), 4);
    EXPECT_EQ(j["kind"].get<std::string>(), std::string(to_string(EventKind::NodeFail)));
    EXPECT_EQ(j["payload"]["node"].get<int>(), 7);
    EXPECT_EQ(line.find('\n'), std::string::npos);
}

TEST(Trace, SinkMatchesStoredRecords) {
    Simulator s;
    std::ostringstream sink;
    s.trace().set_sink(&sink);
    s.schedule(1.5, EventKind::Timer, TimerPayload{TimerType::Detect, 3, 9, 0.25});
    s.schedule(2.5, EventKind::TransferComplete, TransferPayload{TransferPayload::Purpose::Export, 4, 1, 2, 1e6});
    s.run();
    EXPECT_EQ(sink.str(), to_jsonl(s.trace()));
}

TEST(FailureSchedule, Validation) {
    FailureSchedule ok{{{0, 1.0, 5.0}, {0, 6.0, std::nullopt}, {1, 2.0, 3.0}}};
    EXPECT_NO_THROW(ok.validate(2));
    FailureSchedule overlap{{{0, 1.0, 5.0}, {0, 4.0, 8.0}}};
    EXPECT_THROW(overlap.validate(2), InvalidSchedule);
    FailureSchedule after_forever{{{0, 1.0, std::nullopt}, {0, 4.0, 8.0}}};
    EXPECT_THROW(after_forever.validate(2), InvalidSchedule);
    FailureSchedule backwards{{{0, 5.0, 5.0}}};
    EXPECT_THROW(backwards.validate(2), InvalidSchedule);
    FailureSchedule unknown{{{3, 1.0, 2.0}}};
    EXPECT_THROW(unknown.validate(2), InvalidSchedule);
}

TEST(FailureGenerator, ProducesValidSchedules) {
    Rng gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        FailureGenerator g;
        g.count = static_cast<int>(gen.below(30));
        g.horizon = gen.uniform(10.0, 1000.0);
        g.downtime = {gen.uniform(1.0, 10.0), gen.uniform(10.0, 100.0)};
        g.recover = gen.below(2) == 0;
        const int nodes = 1 + static_cast<int>(gen.below(40));
        auto s = generate_failures(g, nodes, gen.next());
        EXPECT_NO_THROW(s.validate(nodes));
        EXPECT_LE(s.entries.size(), static_cast<std::size_t>(g.count));
        for (const auto& e : s.entries) {
            EXPECT_GE(e.fail_time, 0.0);
            EXPECT_LE(e.fail_time, g.horizon);
            if (e.recover_time) {
                EXPECT_GE(*e.recover_time - e.fail_time, g.downtime.lo - 1e-9);
                EXPECT_LE(*e.recover_time - e.fail_time, g.downtime.hi + 1e-9);
            } else {
                EXPECT_FALSE(g.recover);
            }
        }
        if (!g.recover) EXPECT_LE(s.entries.size(), static_cast<std::size_t>(nodes));
    }
}

TEST(FailureGenerator, ExcludedNodesNeverFail) {
    FailureGenerator g;
    g.count = 50;
    auto s = generate_failures(g, 5, 11, {0, 1});
    for (const auto& e : s.entries) EXPECT_GE(e.node, 2);
}
