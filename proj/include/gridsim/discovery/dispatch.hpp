#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <unordered_set>
#include <variant>
#include <vector>

#include "gridsim/discovery/registry.hpp"

namespace gridsim::discovery {

/// Escalation stage a query has reached. Never decreases along a query's path.
enum class Stage : std::uint8_t { Subgrid, Region, InterRegion };

struct Hop {
    Stage stage = Stage::Subgrid;
    NodeId peer = kNoNode;

    friend bool operator==(const Hop&, const Hop&) = default;
};

struct QueryMessage {
    std::int64_t query_id = 0;
    model::QueryConstraint constraint;
    NodeId origin = kNoNode;
    std::vector<Hop> hops;

    /// Appends a hop. Throws std::logic_error if `stage` would go backwards.
    void record(Stage stage, NodeId peer);
};

/// Sub-grid peaks can host `constraint` in aggregate: enough members, and
/// flops and storage peaks each cover count times the per-node threshold.
bool qualifies(const CumulativePower& power, const model::QueryConstraint& constraint);

struct EscalateInterRegion {
    friend bool operator==(const EscalateInterRegion&, const EscalateInterRegion&) = default;
};

using DispatchDecision = std::variant<SubgridId, EscalateInterRegion>;

/// Among qualifying sub-grids not in `exclude`, the one with the largest
/// peak_flops headroom; ties to the lower sub-grid id.
DispatchDecision region_dispatch(const std::map<SubgridId, CumulativePower>& powers,
                                 const model::QueryConstraint& constraint,
                                 const std::set<SubgridId>& exclude = {});

/// Other regions in the order the origin's region peer contacts them.
std::vector<RegionId> inter_region_order(RegionId origin, int region_count);

/// At-most-once processing of query ids at one peer.
class QueryDedup {
public:
    /// True the first time `query_id` is seen.
    bool first_delivery(std::int64_t query_id) { return seen_.insert(query_id).second; }

private:
    std::unordered_set<std::int64_t> seen_;
};

}  // namespace gridsim::discovery
