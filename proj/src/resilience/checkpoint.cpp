#include "gridsim/resilience/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <spdlog/spdlog.h>

namespace gridsim::resilience {

std::vector<std::string> CheckpointPolicy::violations() const {
    std::vector<std::string> out;
    if (!(W > 0.0 && W < 2.0)) out.push_back("checkpoint W=" + std::to_string(W) + " outside (0,2) convergence domain");
    if (I0 < 0.0 || I1 < 0.0) out.push_back("checkpoint seed intervals must be >= 0");
    if (export_every < 1) out.push_back("checkpoint export_every must be >= 1");
    if (checkpoint_cost < 0.0) out.push_back("checkpoint_cost must be >= 0");
    if (!(min_interval > 0.0)) out.push_back("checkpoint min_interval must be > 0");
    if (max_interval < min_interval) out.push_back("checkpoint max_interval must be >= min_interval");
    if (!(mtbf_prior > 0.0)) out.push_back("checkpoint mtbf_prior must be > 0");
    if (export_bytes < 0.0) out.push_back("checkpoint export_bytes must be >= 0");
    if (!(history_weight > 0.0 && history_weight <= 1.0)) out.push_back("checkpoint history_weight must be in (0,1]");
    return out;
}

std::vector<std::string> CheckpointPolicy::warnings() const {
    std::vector<std::string> out;
    if (W >= 1.0 && W < 2.0)
        out.push_back("checkpoint W=" + std::to_string(W) + " makes intervals oscillate and may hit min_interval");
    return out;
}

double next_interval(const CheckpointPolicy& policy, double i_prev, double i_prev2) {
    // Equal seeds are a fixed point; skip the arithmetic so it stays exact.
    const double v = i_prev == i_prev2 ? i_prev : policy.W * i_prev + (1.0 - policy.W) * i_prev2;
    if (v < policy.min_interval) {
        if (v <= 0.0) spdlog::warn("checkpoint interval recurrence went non-positive ({}), clamping to {}", v,
                                   policy.min_interval);
        return policy.min_interval;
    }
    return std::min(v, policy.max_interval);
}

double interval_limit(double W, double i0, double i1) { return ((1.0 - W) * i0 + i1) / (2.0 - W); }

void FailureHistory::record(double fail_time) {
    const double gap = fail_time - (failures_.empty() ? 0.0 : failures_.back());
    ew_gap_ = failures_.empty() ? gap : weight_ * gap + (1.0 - weight_) * ew_gap_;
    failures_.push_back(fail_time);
}

double FailureHistory::ew_failure_rate() const {
    if (failures_.empty()) return 0.0;
    if (ew_gap_ <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / ew_gap_;
}

double FailureHistory::mtbf_estimate(double prior) const {
    if (failures_.empty()) return prior;
    return ew_gap_;
}

std::pair<double, double> seed_intervals(const FailureHistory& history, double checkpoint_cost,
                                         const CheckpointPolicy& policy) {
    const double mtbf = history.mtbf_estimate(policy.mtbf_prior);
    const double young =
        std::clamp(std::sqrt(2.0 * checkpoint_cost * mtbf), policy.min_interval, policy.max_interval);
    return {policy.I0 > 0.0 ? policy.I0 : young, policy.I1 > 0.0 ? policy.I1 : young};
}

Recovery recover_progress(double progress, std::optional<double> exported) {
    if (exported && *exported <= progress) return {*exported, progress - *exported, false};
    return {0.0, progress, true};
}

std::optional<double> last_export(const std::vector<double>& checkpoints, int export_every) {
    if (export_every < 1) return std::nullopt;
    const std::size_t e = static_cast<std::size_t>(export_every);
    const std::size_t idx = checkpoints.size() / e * e;
    if (idx == 0) return std::nullopt;
    return checkpoints[idx - 1];
}

}  // namespace gridsim::resilience
