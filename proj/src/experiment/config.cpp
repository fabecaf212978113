#include "gridsim/experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <spdlog/spdlog.h>

#include "gridsim/error.hpp"
#include "gridsim/model/json.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::experiment {

using nlohmann::json;

namespace {

class Checker {
public:
    void add(std::string v) { violations.push_back(std::move(v)); }

    /// Reads `key` when present and not null; records a violation on a type
    /// mismatch and leaves `out` untouched.
    template <typename T>
    void read(const json& obj, const std::string& ctx, const char* key, T& out) {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return;
        try {
            out = it->get<T>();
        } catch (const std::exception&) {
            add(ctx + "." + key + " has the wrong type");
        }
    }

    bool object(const json& j, const std::string& ctx) {
        if (j.is_object()) return true;
        add(ctx + " must be an object");
        return false;
    }

    std::vector<std::string> violations;
};

void read_platform(const json& j, ExperimentConfig& c, Checker& ck) {
    if (!ck.object(j, "platform")) return;
    try {
        model::from_json(j, c.platform);
    } catch (const GridError& e) {
        ck.add(std::string("platform: ") + e.what());
        return;
    }
    for (auto& v : c.platform.violations()) ck.add("platform: " + v);
}

void read_workload(const json& j, ExperimentConfig& c, Checker& ck) {
    if (!ck.object(j, "workload")) return;
    std::string cls = std::string(model::to_string(c.workload.job_class));
    ck.read(j, "workload", "class", cls);
    try {
        c.workload.job_class = model::job_class_from_string(cls);
    } catch (const GridError& e) {
        ck.add(std::string("workload.class: ") + e.what());
    }
    ck.read(j, "workload", "count", c.workload.count);
    if (c.workload.count < 1) ck.add("workload.count must be >= 1");
    if (auto it = j.find("submit_policy"); it != j.end() && !it->is_null()) {
        try {
            model::from_json(*it, c.workload.submit_policy);
        } catch (const GridError& e) {
            ck.add(std::string("workload.submit_policy: ") + e.what());
        }
        if (c.workload.submit_policy.kind == model::SubmitPolicy::Kind::Poisson && !(c.workload.submit_policy.rate > 0))
            ck.add("workload.submit_policy.rate must be > 0");
    }
}

void read_policies(const json& j, ExperimentConfig& c, Checker& ck) {
    if (!j.is_array()) {
        ck.add("policies must be an array of policy names");
        return;
    }
    std::set<broker::PolicyKind> seen;
    for (const auto& p : j) {
        if (!p.is_string()) {
            ck.add("policies entries must be strings");
            continue;
        }
        try {
            auto kind = broker::policy_from_string(p.get<std::string>());
            if (!seen.insert(kind).second) {
                ck.add("policies lists '" + p.get<std::string>() + "' twice");
                continue;
            }
            c.policies.push_back(kind);
        } catch (const GridError& e) {
            ck.add(std::string("policies: ") + e.what());
        }
    }
}

void read_failures(const json& j, ExperimentConfig& c, Checker& ck) {
    if (j.is_null()) return;
    if (!ck.object(j, "failure_schedule")) return;
    if (auto it = j.find("entries"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            ck.add("failure_schedule.entries must be an array");
        } else {
            sim::FailureSchedule schedule;
            for (const auto& e : *it) {
                if (!ck.object(e, "failure_schedule.entries[]")) continue;
                sim::FailureEntry entry;
                ck.read(e, "failure_schedule.entries[]", "node", entry.node);
                ck.read(e, "failure_schedule.entries[]", "fail_time", entry.fail_time);
                double recover = 0.0;
                if (auto r = e.find("recover_time"); r != e.end() && !r->is_null()) {
                    ck.read(e, "failure_schedule.entries[]", "recover_time", recover);
                    entry.recover_time = recover;
                }
                schedule.entries.push_back(entry);
            }
            c.failures.schedule = std::move(schedule);
        }
    }
    if (auto it = j.find("generator"); it != j.end() && !it->is_null()) {
        if (ck.object(*it, "failure_schedule.generator")) {
            sim::FailureGenerator gen;
            ck.read(*it, "failure_schedule.generator", "count", gen.count);
            ck.read(*it, "failure_schedule.generator", "horizon", gen.horizon);
            ck.read(*it, "failure_schedule.generator", "recover", gen.recover);
            if (auto d = it->find("downtime"); d != it->end() && !d->is_null()) {
                try {
                    model::from_json(*d, gen.downtime);
                } catch (const GridError& e) {
                    ck.add(std::string("failure_schedule.generator.downtime: ") + e.what());
                }
            }
            if (gen.count < 0) ck.add("failure_schedule.generator.count must be >= 0");
            if (!(gen.horizon > 0)) ck.add("failure_schedule.generator.horizon must be > 0");
            if (!(gen.downtime.lo > 0) || gen.downtime.hi < gen.downtime.lo)
                ck.add("failure_schedule.generator.downtime must satisfy 0 < lo <= hi");
            c.failures.generator = gen;
        }
    }
    if (c.failures.schedule && c.failures.generator)
        ck.add("failure_schedule takes either entries or a generator, not both");
}

void read_checkpoint(const json& j, ExperimentConfig& c, Checker& ck) {
    if (j.is_null()) return;
    if (!ck.object(j, "checkpoint")) return;
    resilience::CheckpointPolicy p;
    ck.read(j, "checkpoint", "W", p.W);
    ck.read(j, "checkpoint", "I0", p.I0);
    ck.read(j, "checkpoint", "I1", p.I1);
    ck.read(j, "checkpoint", "export_every", p.export_every);
    ck.read(j, "checkpoint", "checkpoint_cost", p.checkpoint_cost);
    ck.read(j, "checkpoint", "min_interval", p.min_interval);
    ck.read(j, "checkpoint", "max_interval", p.max_interval);
    ck.read(j, "checkpoint", "mtbf_prior", p.mtbf_prior);
    ck.read(j, "checkpoint", "export_bytes", p.export_bytes);
    ck.read(j, "checkpoint", "history_weight", p.history_weight);
    for (auto& v : p.violations()) ck.add(v);
    for (auto& w : p.warnings()) spdlog::warn("{}", w);
    c.checkpoint = p;
}

}  // namespace

std::vector<int> ExperimentConfig::sweep() const {
    if (node_counts.empty()) return {platform.node_count};
    return node_counts;
}

ExperimentConfig validate_config(const json& raw) {
    ExperimentConfig c;
    Checker ck;
    if (!raw.is_object()) throw ValidationError({"config must be a JSON object"});

    static const std::set<std::string> known = {"platform", "workload", "policies", "failure_schedule",
                                                "erasure", "checkpoint", "detector", "broker",
                                                "seeds", "output_path", "node_counts", "trace"};
    for (const auto& [key, value] : raw.items())
        if (!known.count(key)) ck.add("unknown field '" + key + "'");

    if (auto it = raw.find("platform"); it != raw.end()) read_platform(*it, c, ck);
    if (auto it = raw.find("workload"); it != raw.end()) {
        read_workload(*it, c, ck);
    } else {
        ck.add("workload is required");
    }
    if (auto it = raw.find("policies"); it != raw.end()) read_policies(*it, c, ck);
    if (c.policies.empty()) ck.add("at least one policy is required");
    if (auto it = raw.find("failure_schedule"); it != raw.end()) read_failures(*it, c, ck);

    if (auto it = raw.find("erasure"); it != raw.end() && ck.object(*it, "erasure")) {
        ck.read(*it, "erasure", "k", c.erasure.k);
        ck.read(*it, "erasure", "n", c.erasure.n);
    }
    for (auto& v : c.erasure.violations()) ck.add(v);

    if (auto it = raw.find("checkpoint"); it != raw.end()) read_checkpoint(*it, c, ck);

    if (auto it = raw.find("detector"); it != raw.end() && ck.object(*it, "detector")) {
        ck.read(*it, "detector", "heartbeat_period", c.detector.heartbeat_period);
        ck.read(*it, "detector", "missed_heartbeats", c.detector.missed_heartbeats);
        ck.read(*it, "detector", "election_round", c.detector.election_round);
    }
    if (!(c.detector.heartbeat_period > 0)) ck.add("detector.heartbeat_period must be > 0");
    if (c.detector.missed_heartbeats < 1) ck.add("detector.missed_heartbeats must be >= 1");
    if (!(c.detector.election_round > 0)) ck.add("detector.election_round must be > 0");

    if (auto it = raw.find("broker"); it != raw.end() && ck.object(*it, "broker")) {
        ck.read(*it, "broker", "message_bytes", c.broker.message_bytes);
        ck.read(*it, "broker", "probe_bytes", c.broker.probe_bytes);
        ck.read(*it, "broker", "probe_noise", c.broker.probe_noise);
        ck.read(*it, "broker", "poll_timeout", c.broker.poll_timeout);
    }
    if (!(c.broker.message_bytes > 0)) ck.add("broker.message_bytes must be > 0");
    if (c.broker.probe_bytes < 0) ck.add("broker.probe_bytes must be >= 0");
    if (c.broker.probe_noise < 0 || c.broker.probe_noise >= 1) ck.add("broker.probe_noise must be in [0,1)");
    if (!(c.broker.poll_timeout > 0)) ck.add("broker.poll_timeout must be > 0");

    if (auto it = raw.find("seeds"); it != raw.end()) {
        if (!it->is_array()) {
            ck.add("seeds must be an array of unsigned integers");
        } else {
            for (const auto& s : *it) {
                // Values built in code are signed even when non-negative.
                if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
                    ck.add("seeds entries must be unsigned integers");
                    continue;
                }
                c.seeds.push_back(s.get<std::uint64_t>());
            }
        }
    }
    if (c.seeds.empty()) ck.add("at least one seed is required");

    ck.read(raw, "config", "output_path", c.output_path);
    ck.read(raw, "config", "trace", c.write_traces);
    if (auto it = raw.find("node_counts"); it != raw.end() && !it->is_null()) {
        ck.read(raw, "config", "node_counts", c.node_counts);
        for (int n : c.node_counts)
            if (n < 1) ck.add("node_counts entries must be >= 1");
    }

    if (c.failures.schedule) {
        const auto sweep = c.sweep();
        const int smallest = sweep.empty() ? 0 : *std::min_element(sweep.begin(), sweep.end());
        try {
            c.failures.schedule->validate(smallest);
        } catch (const GridError& e) {
            ck.add(std::string("failure_schedule: ") + e.what());
        }
    }

    if (!ck.violations.empty()) throw ValidationError(std::move(ck.violations));
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    json raw;
    try {
        raw = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + e.what(),
                         line, column);
    }
    return validate_config(raw);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GridError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

json to_json(const ExperimentConfig& c) {
    json j;
    model::to_json(j["platform"], c.platform);
    json submit;
    model::to_json(submit, c.workload.submit_policy);
    j["workload"] = {{"class", model::to_string(c.workload.job_class)},
                     {"count", c.workload.count},
                     {"submit_policy", submit}};
    j["policies"] = json::array();
    for (auto p : c.policies) j["policies"].push_back(broker::to_string(p));
    if (c.failures.schedule) {
        json entries = json::array();
        for (const auto& e : c.failures.schedule->entries) {
            json entry = {{"node", e.node}, {"fail_time", e.fail_time}};
            if (e.recover_time) entry["recover_time"] = *e.recover_time;
            entries.push_back(entry);
        }
        j["failure_schedule"] = {{"entries", entries}};
    } else if (c.failures.generator) {
        const auto& g = *c.failures.generator;
        json downtime;
        model::to_json(downtime, g.downtime);
        j["failure_schedule"] = {
            {"generator", {{"count", g.count}, {"horizon", g.horizon}, {"downtime", downtime}, {"recover", g.recover}}}};
    } else {
        j["failure_schedule"] = nullptr;
    }
    j["erasure"] = {{"k", c.erasure.k}, {"n", c.erasure.n}};
    if (c.checkpoint) {
        const auto& p = *c.checkpoint;
        j["checkpoint"] = {{"W", p.W},
                           {"I0", p.I0},
                           {"I1", p.I1},
                           {"export_every", p.export_every},
                           {"checkpoint_cost", p.checkpoint_cost},
                           {"min_interval", p.min_interval},
                           {"max_interval", p.max_interval},
                           {"mtbf_prior", p.mtbf_prior},
                           {"export_bytes", p.export_bytes},
                           {"history_weight", p.history_weight}};
    } else {
        j["checkpoint"] = nullptr;
    }
    j["detector"] = {{"heartbeat_period", c.detector.heartbeat_period},
                     {"missed_heartbeats", c.detector.missed_heartbeats},
                     {"election_round", c.detector.election_round}};
    j["broker"] = {{"message_bytes", c.broker.message_bytes},
                   {"probe_bytes", c.broker.probe_bytes},
                   {"probe_noise", c.broker.probe_noise},
                   {"poll_timeout", c.broker.poll_timeout}};
    j["seeds"] = c.seeds;
    j["output_path"] = c.output_path;
    if (!c.node_counts.empty()) j["node_counts"] = c.node_counts;
    j["trace"] = c.write_traces;
    return j;
}

runtime::RuntimeConfig runtime_config(const ExperimentConfig& c, broker::PolicyKind policy, std::uint64_t seed) {
    runtime::RuntimeConfig rc;
    rc.policy = policy;
    rc.message_bytes = c.broker.message_bytes;
    rc.probe_bytes = c.broker.probe_bytes;
    rc.probe_noise = c.broker.probe_noise;
    rc.probe_seed = substream(seed, "probe");
    rc.poll_timeout = c.broker.poll_timeout;
    rc.heartbeat_period = c.detector.heartbeat_period;
    rc.missed_heartbeats = c.detector.missed_heartbeats;
    rc.election_round = c.detector.election_round;
    rc.erasure = c.erasure;
    rc.checkpoint = c.checkpoint;
    rc.keep_trace = false;
    return rc;
}

}  // namespace gridsim::experiment
