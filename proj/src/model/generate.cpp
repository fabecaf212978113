#include "gridsim/model/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gridsim/error.hpp"
#include "gridsim/model/partition.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::model {

namespace {

std::vector<LinkSpec> random_connected_links(const PlatformSpec& spec) {
    const auto n = static_cast<std::uint64_t>(spec.node_count);
    std::vector<LinkSpec> links;
    if (n < 2) return links;

    Rng rng(substream(spec.rng_seed, "links"));
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::uint64_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    std::set<std::pair<NodeId, NodeId>> present;
    auto add = [&](NodeId a, NodeId b) {
        auto key = std::minmax(a, b);
        if (!present.insert(key).second) return false;
        LinkSpec link;
        link.endpoints = key;
        link.bandwidth = rng.uniform(spec.bandwidth_range.lo, spec.bandwidth_range.hi);
        link.latency = rng.uniform(spec.latency_range.lo, spec.latency_range.hi);
        links.push_back(link);
        return true;
    };

    // Random spanning tree: each node attaches to a uniformly chosen earlier one.
    for (std::uint64_t i = 1; i < n; ++i) add(order[i], order[rng.below(i)]);

    const std::uint64_t max_edges = n * (n - 1) / 2;
    auto target = static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * spec.mean_degree / 2.0));
    target = std::clamp<std::uint64_t>(target, n - 1, max_edges);
    while (links.size() < target) {
        auto a = static_cast<NodeId>(rng.below(n));
        auto b = static_cast<NodeId>(rng.below(n));
        if (a != b) add(a, b);
    }
    return links;
}

}  // namespace

GridTopology generate_platform(const PlatformSpec& spec) {
    spec.validate();

    GridTopology topo;
    Rng rng(substream(spec.rng_seed, "nodes"));
    topo.nodes.reserve(static_cast<std::size_t>(spec.node_count));
    for (int i = 0; i < spec.node_count; ++i) {
        NodeSpec node;
        node.node_id = i;
        node.capability = rng.uniform(spec.capability_range.lo, spec.capability_range.hi);
        node.storage = rng.uniform(spec.storage_range.lo, spec.storage_range.hi);
        node.availability = rng.uniform(spec.availability_range.lo, spec.availability_range.hi);
        node.owner_share = rng.uniform(spec.owner_share_range.lo, spec.owner_share_range.hi);
        topo.nodes.push_back(node);
    }
    topo.links = random_connected_links(spec);
    topo.subgrids = form_subgrids(topo, spec.rtt_threshold);
    topo.regions = form_regions(topo, spec.region_proximity_threshold);
    return topo;
}

std::vector<Job> generate_workload(JobClass job_class, int count, SubmitPolicy policy,
                                   std::uint64_t rng_seed, int node_count) {
    if (count < 1) throw InvalidSpec("workload count must be >= 1");
    if (node_count < 1) throw InvalidSpec("workload needs at least one origin node");
    if (policy.kind == SubmitPolicy::Kind::Poisson && !(policy.rate > 0.0))
        throw InvalidSpec("poisson submit rate must be > 0");

    Rng rng(rng_seed);
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(count));
    double t = 0.0;
    for (int i = 0; i < count; ++i) {
        Job job;
        job.job_id = i;
        job.job_class = job_class;
        job.flop_demand = job_class == JobClass::Network ? 0.0 : kJobFlop;
        job.byte_demand = job_class == JobClass::Compute ? 0.0 : kJobBytes;
        job.origin_node = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(node_count)));
        if (policy.kind == SubmitPolicy::Kind::Poisson) t += rng.exponential(policy.rate);
        job.submit_time = t;
        jobs.push_back(job);
    }
    return jobs;
}

}  // namespace gridsim::model
