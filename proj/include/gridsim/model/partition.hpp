#pragma once

#include <functional>
#include <vector>

#include "gridsim/model/types.hpp"

namespace gridsim::model {

/// Connected components of the link graph restricted to links with
/// rtt <= rtt_threshold. Each component's super-peer is its member with the
/// largest (availability, node_id). Ids are assigned in order of each
/// component's smallest member.
std::vector<SubGrid> form_subgrids(const GridTopology& topology, double rtt_threshold);

using RttFunction = std::function<double(NodeId, NodeId)>;

/// Groups sub-grids whose super-peers are within `proximity_threshold` rtt
/// (transitively). Sets `SubGrid::region` on every entry of `subgrids`.
std::vector<Region> form_regions(const std::vector<NodeSpec>& nodes, std::vector<SubGrid>& subgrids,
                                 double proximity_threshold, const RttFunction& rtt);

/// Same, using shortest-latency path rtt between super-peers.
std::vector<Region> form_regions(GridTopology& topology, double proximity_threshold);

/// Leader among `candidates` by (availability, node_id); kNoNode when empty.
NodeId most_available(const std::vector<NodeSpec>& nodes, const std::vector<NodeId>& candidates);

}  // namespace gridsim::model
