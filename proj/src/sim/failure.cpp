#include "gridsim/sim/failure.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "gridsim/error.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::sim {

void FailureSchedule::validate(int node_count) const {
    std::map<NodeId, std::vector<std::pair<double, double>>> per_node;
    for (const auto& e : entries) {
        if (e.node < 0 || e.node >= node_count)
            throw InvalidSchedule("failure for unknown node " + std::to_string(e.node));
        if (!(e.fail_time >= 0.0)) throw InvalidSchedule("fail_time must be >= 0");
        if (e.recover_time && !(*e.recover_time > e.fail_time))
            throw InvalidSchedule("recover_time must be after fail_time for node " + std::to_string(e.node));
        per_node[e.node].emplace_back(e.fail_time, e.recover_time.value_or(std::numeric_limits<double>::infinity()));
    }
    for (auto& [node, intervals] : per_node) {
        std::sort(intervals.begin(), intervals.end());
        for (std::size_t i = 1; i < intervals.size(); ++i) {
            if (intervals[i].first < intervals[i - 1].second)
                throw InvalidSchedule("overlapping failure intervals for node " + std::to_string(node));
        }
    }
}

FailureSchedule generate_failures(const FailureGenerator& gen, int node_count, std::uint64_t seed,
                                  const std::vector<NodeId>& exclude) {
    FailureSchedule schedule;
    std::vector<NodeId> candidates;
    for (NodeId i = 0; i < node_count; ++i)
        if (std::find(exclude.begin(), exclude.end(), i) == exclude.end()) candidates.push_back(i);
    if (candidates.empty() || gen.count <= 0) return schedule;

    Rng rng(seed);
    std::map<NodeId, std::vector<std::pair<double, double>>> busy;
    int attempts = 0;
    while (static_cast<int>(schedule.entries.size()) < gen.count && attempts < gen.count * 100) {
        ++attempts;
        NodeId node = candidates[rng.below(candidates.size())];
        double fail = rng.uniform(0.0, gen.horizon);
        double down = rng.uniform(gen.downtime.lo, gen.downtime.hi);
        double end = gen.recover ? fail + down : std::numeric_limits<double>::infinity();
        auto& intervals = busy[node];
        bool clash = std::any_of(intervals.begin(), intervals.end(),
                                 [&](const auto& iv) { return fail < iv.second && iv.first < end; });
        if (clash) continue;
        intervals.emplace_back(fail, end);
        FailureEntry e;
        e.node = node;
        e.fail_time = fail;
        if (gen.recover) e.recover_time = end;
        schedule.entries.push_back(e);
    }
    std::sort(schedule.entries.begin(), schedule.entries.end(), [](const auto& a, const auto& b) {
        return a.fail_time != b.fail_time ? a.fail_time < b.fail_time : a.node < b.node;
    });
    return schedule;
}

}  // namespace gridsim::sim
