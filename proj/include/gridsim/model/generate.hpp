#pragma once

#include <cstdint>
#include <vector>

#include "gridsim/model/types.hpp"

namespace gridsim::model {

/// Random connected platform: nodes drawn uniformly from the PlatformSpec ranges,
/// a random spanning tree plus extra edges up to `mean_degree`, then
/// sub-grids and regions formed from the rtt thresholds.
GridTopology generate_platform(const PlatformSpec& spec);

struct SubmitPolicy {
    enum class Kind { AllAtZero, Poisson };
    Kind kind = Kind::AllAtZero;
    double rate = 1.0;  // jobs/s, Poisson only

    static SubmitPolicy all_at_zero() { return {}; }
    static SubmitPolicy poisson(double rate) { return {Kind::Poisson, rate}; }
};

/// Demand per job for each class.
inline constexpr double kJobFlop = 1e9;
inline constexpr double kJobBytes = 1e9;

std::vector<Job> generate_workload(JobClass job_class, int count, SubmitPolicy policy,
                                   std::uint64_t rng_seed, int node_count);

}  // namespace gridsim::model
