#include "gridsim/discovery/dispatch.hpp"

#include <stdexcept>

namespace gridsim::discovery {

void QueryMessage::record(Stage stage, NodeId peer) {
    if (!hops.empty() && stage < hops.back().stage)
        throw std::logic_error("query escalation stage cannot decrease");
    hops.push_back(Hop{stage, peer});
}

bool qualifies(const CumulativePower& power, const model::QueryConstraint& c) {
    return power.member_count >= c.count && power.peak_flops >= c.min_capability * c.count &&
           power.peak_storage >= c.min_storage * c.count;
}

DispatchDecision region_dispatch(const std::map<SubgridId, CumulativePower>& powers,
                                 const model::QueryConstraint& constraint, const std::set<SubgridId>& exclude) {
    SubgridId best = -1;
    double best_headroom = 0.0;
    // Ascending map order makes the strict comparison keep the lower id on ties.
    for (const auto& [id, power] : powers) {
        if (exclude.count(id) || !qualifies(power, constraint)) continue;
        const double headroom = power.peak_flops - constraint.min_capability * constraint.count;
        if (best < 0 || headroom > best_headroom) {
            best = id;
            best_headroom = headroom;
        }
    }
    if (best < 0) return EscalateInterRegion{};
    return best;
}

std::vector<RegionId> inter_region_order(RegionId origin, int region_count) {
    std::vector<RegionId> out;
    for (RegionId r = 0; r < region_count; ++r)
        if (r != origin) out.push_back(r);
    return out;
}

}  // namespace gridsim::discovery
