#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridsim {

using NodeId = std::int32_t;
using SubgridId = std::int32_t;
using RegionId = std::int32_t;
using JobId = std::int64_t;

inline constexpr NodeId kNoNode = -1;

}  // namespace gridsim

namespace gridsim::model {

/// Closed interval [lo, hi].
struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

struct NodeSpec {
    NodeId node_id = 0;
    double capability = 0.0;    // FLOP/s
    double storage = 0.0;       // free bytes
    double availability = 0.0;  // predicted up-fraction in [0, 1]
    double owner_share = 1.0;   // fraction of capability offered to the grid

    double effective_rate() const { return capability * owner_share; }

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// Election and role key: lexicographic (availability, node_id).
inline bool ranks_below(const NodeSpec& a, const NodeSpec& b) {
    return std::pair(a.availability, a.node_id) < std::pair(b.availability, b.node_id);
}

struct LinkSpec {
    std::pair<NodeId, NodeId> endpoints;
    double bandwidth = 0.0;  // bit/s
    double latency = 0.0;    // seconds, one-way

    double rtt() const { return 2.0 * latency; }
    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct PlatformSpec {
    int node_count = 50;
    Range capability_range{1e4, 1e8};
    Range bandwidth_range{5.6e4, 8e7};
    Range latency_range{1e-3, 5e-2};
    Range storage_range{1e10, 1e12};
    double rtt_threshold = 1.0;
    double region_proximity_threshold = 1.0;
    std::uint64_t rng_seed = 0;

    // Generation knobs not fixed by the platform description itself.
    Range availability_range{0.5, 1.0};
    Range owner_share_range{1.0, 1.0};
    double mean_degree = 4.0;

    /// Every violated invariant, empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;  // throws InvalidSpec
};

enum class JobClass { Compute, Network, Hybrid };

std::string_view to_string(JobClass c);
JobClass job_class_from_string(std::string_view s);  // throws InvalidSpec

struct Job {
    JobId job_id = 0;
    JobClass job_class = JobClass::Compute;
    double flop_demand = 0.0;
    double byte_demand = 0.0;
    double submit_time = 0.0;
    NodeId origin_node = 0;

    friend bool operator==(const Job&, const Job&) = default;
};

struct SubGrid {
    SubgridId id = 0;
    std::vector<NodeId> members;  // ascending
    NodeId super_peer = kNoNode;
    RegionId region = -1;

    friend bool operator==(const SubGrid&, const SubGrid&) = default;
};

struct Region {
    RegionId id = 0;
    std::vector<SubgridId> subgrids;  // ascending
    NodeId region_peer = kNoNode;

    friend bool operator==(const Region&, const Region&) = default;
};

struct GridTopology {
    std::vector<NodeSpec> nodes;  // indexed by node_id
    std::vector<LinkSpec> links;
    std::vector<SubGrid> subgrids;  // indexed by SubgridId
    std::vector<Region> regions;    // indexed by RegionId

    const NodeSpec& node(NodeId id) const { return nodes.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes.size(); }

    /// Sub-grid owning each node, indexed by node_id.
    std::vector<SubgridId> subgrid_index() const;

    friend bool operator==(const GridTopology&, const GridTopology&) = default;
};

struct QueryConstraint {
    double min_capability = 0.0;
    double min_storage = 0.0;
    int count = 1;

    bool satisfied_by(double capability, double free_storage) const {
        return capability >= min_capability && free_storage >= min_storage;
    }
};

}  // namespace gridsim::model
