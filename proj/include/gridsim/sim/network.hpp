#pragma once

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "gridsim/model/types.hpp"

namespace gridsim::sim {

inline constexpr double kInfiniteBandwidth = std::numeric_limits<double>::infinity();

/// Latency and bottleneck bandwidth of one routed path.
struct PathMetrics {
    double latency = 0.0;                     // sum of hop latencies, s
    double bandwidth = kInfiniteBandwidth;    // min hop bandwidth, bit/s
    int hops = 0;

    double rtt() const { return 2.0 * latency; }
};

/// latency + bytes*8 / bottleneck. An empty path (source == destination)
/// costs nothing.
double transfer_time(double bytes, std::span<const model::LinkSpec> hops);
double transfer_time(double bytes, const PathMetrics& path);

/// Processor-sharing completion time for `flop` on `node` already shared
/// with `concurrent_jobs` other jobs.
double compute_time(double flop, const model::NodeSpec& node, int concurrent_jobs);

/// Static shortest-latency routing. Ties between equal-latency paths go to
/// the lexicographically smaller node-id sequence. Trees are computed lazily
/// per source and cached.
class Routing {
public:
    explicit Routing(const model::GridTopology& topology);

    /// Throws NoRoute when `to` is unreachable from `from`.
    const PathMetrics& metrics(NodeId from, NodeId to) const;

    std::vector<NodeId> path(NodeId from, NodeId to) const;
    std::vector<model::LinkSpec> hops(NodeId from, NodeId to) const;

    double rtt(NodeId from, NodeId to) const { return metrics(from, to).rtt(); }
    bool reachable(NodeId from, NodeId to) const;

    std::size_t size() const { return adjacency_.size(); }

private:
    struct Tree {
        std::vector<PathMetrics> metrics;
        std::vector<NodeId> pred;
        std::vector<int> pred_link;
        std::vector<bool> reached;
    };

    const Tree& tree(NodeId source) const;
    Tree build(NodeId source) const;

    std::vector<model::LinkSpec> links_;
    std::vector<std::vector<std::pair<NodeId, int>>> adjacency_;  // (neighbor, link index)
    mutable std::vector<std::unique_ptr<Tree>> trees_;
};

}  // namespace gridsim::sim
