#include "gridsim/model/types.hpp"

#include <cmath>

#include "gridsim/error.hpp"

namespace gridsim::model {

namespace {

void check_range(std::vector<std::string>& out, const char* name, const Range& r, bool positive) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        out.push_back(std::string(name) + " must be finite");
        return;
    }
    if (r.lo > r.hi) out.push_back(std::string(name) + " is inverted (lo > hi)");
    if (positive && !(r.lo > 0.0)) out.push_back(std::string(name) + " must have lo > 0");
    if (!positive && r.lo < 0.0) out.push_back(std::string(name) + " must have lo >= 0");
}

}  // namespace

std::vector<std::string> PlatformSpec::violations() const {
    std::vector<std::string> out;
    if (node_count < 1) out.push_back("PlatformSpec.node_count must be >= 1");
    check_range(out, "PlatformSpec.capability_range", capability_range, true);
    check_range(out, "PlatformSpec.bandwidth_range", bandwidth_range, true);
    check_range(out, "PlatformSpec.latency_range", latency_range, false);
    check_range(out, "PlatformSpec.storage_range", storage_range, false);
    check_range(out, "PlatformSpec.availability_range", availability_range, false);
    if (availability_range.hi > 1.0) out.push_back("PlatformSpec.availability_range must lie in [0, 1]");
    check_range(out, "PlatformSpec.owner_share_range", owner_share_range, true);
    if (owner_share_range.hi > 1.0) out.push_back("PlatformSpec.owner_share_range must lie in (0, 1]");
    if (!(rtt_threshold >= 0.0)) out.push_back("PlatformSpec.rtt_threshold must be >= 0");
    if (!(region_proximity_threshold >= 0.0))
        out.push_back("PlatformSpec.region_proximity_threshold must be >= 0");
    if (!(mean_degree >= 0.0)) out.push_back("PlatformSpec.mean_degree must be >= 0");
    return out;
}

void PlatformSpec::validate() const {
    auto v = violations();
    if (!v.empty()) {
        std::string msg = v.front();
        for (std::size_t i = 1; i < v.size(); ++i) msg += "; " + v[i];
        throw InvalidSpec(msg);
    }
}

std::string_view to_string(JobClass c) {
    switch (c) {
        case JobClass::Compute: return "compute";
        case JobClass::Network: return "network";
        case JobClass::Hybrid: return "hybrid";
    }
    return "unknown";
}

JobClass job_class_from_string(std::string_view s) {
    if (s == "compute") return JobClass::Compute;
    if (s == "network") return JobClass::Network;
    if (s == "hybrid") return JobClass::Hybrid;
    throw InvalidSpec("unknown job class '" + std::string(s) + "'");
}

std::vector<SubgridId> GridTopology::subgrid_index() const {
    std::vector<SubgridId> index(nodes.size(), -1);
    for (const auto& sg : subgrids)
        for (NodeId m : sg.members) index[static_cast<std::size_t>(m)] = sg.id;
    return index;
}

}  // namespace gridsim::model
