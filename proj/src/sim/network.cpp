#include "gridsim/sim/network.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "gridsim/error.hpp"

namespace gridsim::sim {

double transfer_time(double bytes, std::span<const model::LinkSpec> hops) {
    if (hops.empty()) return 0.0;
    double latency = 0.0;
    double bottleneck = kInfiniteBandwidth;
    for (const auto& hop : hops) {
        latency += hop.latency;
        bottleneck = std::min(bottleneck, hop.bandwidth);
    }
    return latency + bytes * 8.0 / bottleneck;
}

double transfer_time(double bytes, const PathMetrics& path) {
    if (path.hops == 0) return 0.0;
    return path.latency + bytes * 8.0 / path.bandwidth;
}

double compute_time(double flop, const model::NodeSpec& node, int concurrent_jobs) {
    if (flop <= 0.0) return 0.0;
    return flop / (node.capability * node.owner_share / (1.0 + concurrent_jobs));
}

Routing::Routing(const model::GridTopology& topology)
    : links_(topology.links), adjacency_(topology.nodes.size()), trees_(topology.nodes.size()) {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        auto [a, b] = links_[i].endpoints;
        adjacency_.at(static_cast<std::size_t>(a)).emplace_back(b, static_cast<int>(i));
        adjacency_.at(static_cast<std::size_t>(b)).emplace_back(a, static_cast<int>(i));
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

const Routing::Tree& Routing::tree(NodeId source) const {
    auto& slot = trees_.at(static_cast<std::size_t>(source));
    if (!slot) slot = std::make_unique<Tree>(build(source));
    return *slot;
}

Routing::Tree Routing::build(NodeId source) const {
    const std::size_t n = adjacency_.size();
    Tree t;
    t.metrics.assign(n, PathMetrics{std::numeric_limits<double>::infinity(), kInfiniteBandwidth, 0});
    t.pred.assign(n, kNoNode);
    t.pred_link.assign(n, -1);
    t.reached.assign(n, false);
    std::vector<bool> settled(n, false);

    auto path_of = [&](NodeId v) {
        std::vector<NodeId> p;
        for (NodeId x = v; x != kNoNode; x = t.pred[static_cast<std::size_t>(x)]) p.push_back(x);
        std::reverse(p.begin(), p.end());
        return p;
    };
    auto less = [&](NodeId a, NodeId b) {
        double da = t.metrics[static_cast<std::size_t>(a)].latency;
        double db = t.metrics[static_cast<std::size_t>(b)].latency;
        if (da != db) return da < db;
        if (a == b) return false;
        auto pa = path_of(a);
        auto pb = path_of(b);
        if (pa != pb) return pa < pb;
        return a < b;
    };
    std::set<NodeId, decltype(less)> frontier(less);

    const auto s = static_cast<std::size_t>(source);
    t.metrics[s] = PathMetrics{0.0, kInfiniteBandwidth, 0};
    t.reached[s] = true;
    frontier.insert(source);

    while (!frontier.empty()) {
        NodeId u = *frontier.begin();
        frontier.erase(frontier.begin());
        const auto ui = static_cast<std::size_t>(u);
        settled[ui] = true;
        for (auto [v, li] : adjacency_[ui]) {
            const auto vi = static_cast<std::size_t>(v);
            if (settled[vi]) continue;
            const auto& link = links_[static_cast<std::size_t>(li)];
            const double nd = t.metrics[ui].latency + link.latency;
            bool better = !t.reached[vi] || nd < t.metrics[vi].latency;
            if (!better && nd == t.metrics[vi].latency) {
                auto candidate = path_of(u);
                candidate.push_back(v);
                better = candidate < path_of(v);
            }
            if (!better) continue;
            if (t.reached[vi]) frontier.erase(v);
            t.reached[vi] = true;
            t.pred[vi] = u;
            t.pred_link[vi] = li;
            t.metrics[vi] = PathMetrics{nd, std::min(t.metrics[ui].bandwidth, link.bandwidth),
                                        t.metrics[ui].hops + 1};
            frontier.insert(v);
        }
    }
    return t;
}

bool Routing::reachable(NodeId from, NodeId to) const {
    return tree(from).reached.at(static_cast<std::size_t>(to));
}

const PathMetrics& Routing::metrics(NodeId from, NodeId to) const {
    const auto& t = tree(from);
    const auto ti = static_cast<std::size_t>(to);
    if (!t.reached.at(ti))
        throw NoRoute("no route from node " + std::to_string(from) + " to node " + std::to_string(to));
    return t.metrics[ti];
}

std::vector<NodeId> Routing::path(NodeId from, NodeId to) const {
    metrics(from, to);
    const auto& t = tree(from);
    std::vector<NodeId> p;
    for (NodeId x = to; x != kNoNode; x = t.pred[static_cast<std::size_t>(x)]) p.push_back(x);
    std::reverse(p.begin(), p.end());
    return p;
}

std::vector<model::LinkSpec> Routing::hops(NodeId from, NodeId to) const {
    metrics(from, to);
    const auto& t = tree(from);
    std::vector<model::LinkSpec> out;
    for (NodeId x = to; x != from; x = t.pred[static_cast<std::size_t>(x)])
        out.push_back(links_[static_cast<std::size_t>(t.pred_link[static_cast<std::size_t>(x)])]);
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace gridsim::sim
