#include "gridsim/model/partition.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "gridsim/sim/network.hpp"

namespace gridsim::model {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

/// Components keyed by smallest member, members ascending.
std::vector<std::vector<std::size_t>> components(DisjointSets& sets, std::size_t n) {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

NodeId most_available(const std::vector<NodeSpec>& nodes, const std::vector<NodeId>& candidates) {
    NodeId best = kNoNode;
    for (NodeId id : candidates) {
        if (best == kNoNode || ranks_below(nodes[static_cast<std::size_t>(best)], nodes[static_cast<std::size_t>(id)]))
            best = id;
    }
    return best;
}

std::vector<SubGrid> form_subgrids(const GridTopology& topology, double rtt_threshold) {
    const std::size_t n = topology.nodes.size();
    DisjointSets sets(n);
    for (const auto& link : topology.links) {
        if (link.rtt() <= rtt_threshold)
            sets.unite(static_cast<std::size_t>(link.endpoints.first), static_cast<std::size_t>(link.endpoints.second));
    }
    std::vector<SubGrid> out;
    for (const auto& comp : components(sets, n)) {
        SubGrid sg;
        sg.id = static_cast<SubgridId>(out.size());
        for (std::size_t m : comp) sg.members.push_back(static_cast<NodeId>(m));
        sg.super_peer = most_available(topology.nodes, sg.members);
        out.push_back(std::move(sg));
    }
    return out;
}

std::vector<Region> form_regions(const std::vector<NodeSpec>& nodes, std::vector<SubGrid>& subgrids,
                                 double proximity_threshold, const RttFunction& rtt) {
    const std::size_t n = subgrids.size();
    DisjointSets sets(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (rtt(subgrids[a].super_peer, subgrids[b].super_peer) <= proximity_threshold) sets.unite(a, b);
        }
    }
    std::vector<Region> out;
    for (const auto& comp : components(sets, n)) {
        Region region;
        region.id = static_cast<RegionId>(out.size());
        std::vector<NodeId> peers;
        for (std::size_t s : comp) {
            region.subgrids.push_back(static_cast<SubgridId>(s));
            subgrids[s].region = region.id;
            peers.push_back(subgrids[s].super_peer);
        }
        region.region_peer = most_available(nodes, peers);
        out.push_back(std::move(region));
    }
    return out;
}

std::vector<Region> form_regions(GridTopology& topology, double proximity_threshold) {
    sim::Routing routing(topology);
    return form_regions(topology.nodes, topology.subgrids, proximity_threshold,
                        [&](NodeId a, NodeId b) {
                            return routing.reachable(a, b) ? routing.rtt(a, b)
                                                           : std::numeric_limits<double>::infinity();
                        });
}

}  // namespace gridsim::model
