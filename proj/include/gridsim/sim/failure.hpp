#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridsim/model/types.hpp"

namespace gridsim::sim {

struct FailureEntry {
    NodeId node = kNoNode;
    double fail_time = 0.0;
    std::optional<double> recover_time;  // nullopt: never recovers

    friend bool operator==(const FailureEntry&, const FailureEntry&) = default;
};

struct FailureSchedule {
    std::vector<FailureEntry> entries;

    /// Throws InvalidSchedule on recover <= fail or overlapping intervals for
    /// one node.
    void validate(int node_count) const;
};

struct FailureGenerator {
    int count = 10;
    double horizon = 1000.0;                // fail times uniform in [0, horizon]
    model::Range downtime{60.0, 600.0};     // recovery delay
    bool recover = true;
};

/// Draws `count` failures over distinct time intervals; a node may fail
/// more than once, never while already down.
FailureSchedule generate_failures(const FailureGenerator& gen, int node_count, std::uint64_t seed,
                                  const std::vector<NodeId>& exclude = {});

}  // namespace gridsim::sim
