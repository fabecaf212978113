#pragma once

#include <cstdint>
#include <vector>

#include "gridsim/model/generate.hpp"
#include "gridsim/model/partition.hpp"
#include "gridsim/model/types.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::testing {

inline model::NodeSpec node(NodeId id, double capability, double availability, double storage = 1e12) {
    model::NodeSpec n;
    n.node_id = id;
    n.capability = capability;
    n.availability = availability;
    n.storage = storage;
    return n;
}

inline model::LinkSpec link(NodeId a, NodeId b, double bandwidth, double latency) {
    return {{a, b}, bandwidth, latency};
}

/// Hand-built topology; sub-grids and regions come from the thresholds.
inline model::GridTopology build(std::vector<model::NodeSpec> nodes, std::vector<model::LinkSpec> links,
                                 double rtt_threshold, double proximity) {
    model::GridTopology t;
    t.nodes = std::move(nodes);
    t.links = std::move(links);
    t.subgrids = model::form_subgrids(t, rtt_threshold);
    t.regions = model::form_regions(t, proximity);
    return t;
}

/// Random platform that forms a single sub-grid and region.
inline model::GridTopology flat_platform(int n, std::uint64_t seed) {
    model::PlatformSpec spec;
    spec.node_count = n;
    spec.rtt_threshold = 1e3;
    spec.region_proximity_threshold = 1e3;
    spec.rng_seed = seed;
    return model::generate_platform(spec);
}

/// Star of `n` nodes around node 0 with identical links.
inline model::GridTopology star(std::vector<model::NodeSpec> nodes, double bandwidth = 8e7, double latency = 0.001) {
    std::vector<model::LinkSpec> links;
    for (std::size_t i = 1; i < nodes.size(); ++i) links.push_back(link(0, static_cast<NodeId>(i), bandwidth, latency));
    return build(std::move(nodes), std::move(links), 1.0, 1.0);
}

}  // namespace gridsim::testing
