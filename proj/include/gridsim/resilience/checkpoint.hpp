#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gridsim::resilience {

struct CheckpointPolicy {
    double W = 0.5;                 // smoothing weight of the interval recurrence
    double I0 = 0.0;                // seed intervals; 0 means "derive from failure history"
    double I1 = 0.0;
    int export_every = 5;           // export every E-th checkpoint to the parent node
    double checkpoint_cost = 2.0;   // s the job stalls per checkpoint
    double min_interval = 1.0;
    double max_interval = 1e5;
    double mtbf_prior = 1e4;        // used until a node has failed
    double export_bytes = 1e6;
    double history_weight = 0.5;    // weight of the newest gap in the MTBF average

    /// Hard violations (reject the config).
    std::vector<std::string> violations() const;
    /// Soft issues: W in [1, 2) is accepted but may hit the clamp.
    std::vector<std::string> warnings() const;
};

/// W * i_prev + (1 - W) * i_prev2, clamped below at min_interval with a
/// logged warning when the recurrence goes non-positive.
double next_interval(const CheckpointPolicy& policy, double i_prev, double i_prev2);

/// Limit of the recurrence for 0 < W < 2.
double interval_limit(double W, double i0, double i1);

/// Per-node failure log with an exponentially weighted gap average.
class FailureHistory {
public:
    explicit FailureHistory(double weight = 0.5) : weight_(weight) {}

    void record(double fail_time);

    const std::vector<double>& failures() const { return failures_; }
    /// failures/s; 0 without history.
    double ew_failure_rate() const;
    /// 1 / rate, or `prior` when nothing was recorded.
    double mtbf_estimate(double prior) const;

private:
    double weight_;
    std::vector<double> failures_;
    double ew_gap_ = 0.0;
};

/// Young's approximation sqrt(2 * cost * mtbf), clamped to the policy's
/// interval bounds, returned as both seeds.
std::pair<double, double> seed_intervals(const FailureHistory& history, double checkpoint_cost,
                                         const CheckpointPolicy& policy);

/// Progress restored after the executing node fails, and the work lost.
struct Recovery {
    double restored_flop = 0.0;
    double redone_flop = 0.0;
    bool from_zero = false;
};

/// `progress` is the FLOP done when the node failed; `exported` the last
/// progress safely stored at the parent (nullopt: none, or parent lost it).
Recovery recover_progress(double progress, std::optional<double> exported);

/// Restore point with exports on every E-th of `checkpoints` (progress at
/// checkpoint i is checkpoints[i-1]).
std::optional<double> last_export(const std::vector<double>& checkpoints, int export_every);

}  // namespace gridsim::resilience
