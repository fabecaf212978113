#pragma once

#include <optional>
#include <string>

#include "gridsim/model/types.hpp"

namespace gridsim::sim {

/// Lifecycle outcome of one job; every metric and CSV row derives from these.
struct JobRecord {
    JobId job_id = 0;
    std::string policy;
    model::JobClass job_class = model::JobClass::Compute;
    double submit_time = 0.0;
    std::optional<double> start_time;
    std::optional<double> end_time;
    NodeId node_id = kNoNode;
    SubgridId origin_subgrid = -1;
    SubgridId exec_subgrid = -1;
    int checkpoints_taken = 0;
    int exports_taken = 0;
    double redone_flop = 0.0;
    std::int64_t messages_intra = 0;
    std::int64_t messages_region = 0;
    std::int64_t messages_inter_region = 0;

    // Accounting beyond the CSV schema.
    double flop_demand = 0.0;
    double byte_demand = 0.0;
    double executed_flop = 0.0;
    double data_bytes = 0.0;     // job input actually moved
    double redone_bytes = 0.0;   // input re-sent after failed placements
    double export_bytes = 0.0;
    int restarts = 0;
    int restarts_from_zero = 0;

    bool completed() const { return end_time.has_value(); }
    double completion_time() const { return *end_time - submit_time; }
};

}  // namespace gridsim::sim
