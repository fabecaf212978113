#include "gridsim/model/json.hpp"

#include "gridsim/error.hpp"

namespace gridsim::model {

using nlohmann::json;

namespace {

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

void to_json(json& j, const Range& r) { j = json::array({r.lo, r.hi}); }

void from_json(const json& j, Range& r) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidSpec("range must be a [lo, hi] pair of numbers");
    r.lo = j[0].get<double>();
    r.hi = j[1].get<double>();
}

void to_json(json& j, const PlatformSpec& s) {
    j = json{{"node_count", s.node_count},
             {"capability_range", s.capability_range},
             {"bandwidth_range", s.bandwidth_range},
             {"latency_range", s.latency_range},
             {"storage_range", s.storage_range},
             {"rtt_threshold", s.rtt_threshold},
             {"region_proximity_threshold", s.region_proximity_threshold},
             {"rng_seed", s.rng_seed},
             {"availability_range", s.availability_range},
             {"owner_share_range", s.owner_share_range},
             {"mean_degree", s.mean_degree}};
}

void from_json(const json& j, PlatformSpec& s) {
    if (!j.is_object()) throw InvalidSpec("platform must be an object");
    read_optional(j, "node_count", s.node_count);
    read_optional(j, "capability_range", s.capability_range);
    read_optional(j, "bandwidth_range", s.bandwidth_range);
    read_optional(j, "latency_range", s.latency_range);
    read_optional(j, "storage_range", s.storage_range);
    read_optional(j, "rtt_threshold", s.rtt_threshold);
    read_optional(j, "region_proximity_threshold", s.region_proximity_threshold);
    read_optional(j, "rng_seed", s.rng_seed);
    read_optional(j, "availability_range", s.availability_range);
    read_optional(j, "owner_share_range", s.owner_share_range);
    read_optional(j, "mean_degree", s.mean_degree);
}

void to_json(json& j, const SubmitPolicy& p) {
    if (p.kind == SubmitPolicy::Kind::AllAtZero)
        j = json{{"kind", "all-at-t0"}};
    else
        j = json{{"kind", "poisson"}, {"rate", p.rate}};
}

void from_json(const json& j, SubmitPolicy& p) {
    if (j.is_string()) {
        auto kind = j.get<std::string>();
        if (kind == "all-at-t0") {
            p = SubmitPolicy::all_at_zero();
            return;
        }
        throw InvalidSpec("unknown submit_policy '" + kind + "'");
    }
    if (!j.is_object()) throw InvalidSpec("submit_policy must be a string or object");
    std::string kind = "all-at-t0";
    read_optional(j, "kind", kind);
    if (kind == "all-at-t0") {
        p = SubmitPolicy::all_at_zero();
    } else if (kind == "poisson") {
        p.kind = SubmitPolicy::Kind::Poisson;
        read_optional(j, "rate", p.rate);
    } else {
        throw InvalidSpec("unknown submit_policy '" + kind + "'");
    }
}

void to_json(json& j, const Job& job) {
    j = json{{"job_id", job.job_id},
             {"class", to_string(job.job_class)},
             {"flop_demand", job.flop_demand},
             {"byte_demand", job.byte_demand},
             {"submit_time", job.submit_time},
             {"origin_node", job.origin_node}};
}

void to_json(json& j, const NodeSpec& n) {
    j = json{{"node_id", n.node_id},
             {"capability", n.capability},
             {"storage", n.storage},
             {"availability", n.availability},
             {"owner_share", n.owner_share}};
}

void to_json(json& j, const LinkSpec& l) {
    j = json{{"endpoints", {l.endpoints.first, l.endpoints.second}},
             {"bandwidth", l.bandwidth},
             {"latency", l.latency},
             {"rtt", l.rtt()}};
}

void to_json(json& j, const SubGrid& s) {
    j = json{{"id", s.id}, {"members", s.members}, {"super_peer", s.super_peer}, {"region", s.region}};
}

void to_json(json& j, const Region& r) {
    j = json{{"id", r.id}, {"subgrids", r.subgrids}, {"region_peer", r.region_peer}};
}

void to_json(json& j, const GridTopology& t) {
    j = json{{"nodes", t.nodes}, {"links", t.links}, {"subgrids", t.subgrids}, {"regions", t.regions}};
}

}  // namespace gridsim::model
