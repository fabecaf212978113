#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <spdlog/spdlog.h>

#include "gridsim/error.hpp"
#include "gridsim/experiment/config.hpp"
#include "gridsim/experiment/report.hpp"
#include "gridsim/experiment/runner.hpp"

using namespace gridsim;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

int report_invalid(const ValidationError& e) {
    std::cerr << "invalid config (" << e.violations().size() << " violations):\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
    return kInvalid;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(',', start);
        if (pos == std::string::npos) pos = s.size();
        if (pos > start) out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridsim: grid brokering and self-healing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string policy_override;
    std::string seeds_override;
    int jobs_override = 0;
    int nodes_override = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run every (policy, seed) pair of an experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_path)");
    run->add_option("--policy", policy_override, "Policy or comma list: ncda, flops, rr");
    run->add_option("--seeds", seeds_override, "Comma-separated seeds");
    run->add_option("--jobs", jobs_override, "Number of jobs")->check(CLI::PositiveNumber);
    run->add_option("--nodes", nodes_override, "Platform size, replaces any node-count sweep")
        ->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "Only log warnings");

    std::string summary_path;
    std::string plot_path;
    auto* compare = app.add_subcommand("compare", "Win counts per workload class from a summary");
    compare->add_option("--in", summary_path, "summary.json written by run")->required();
    compare->add_option("--plot", plot_path, "Also write the plot CSV here");

    auto* validate = app.add_subcommand("validate", "Check a config and list every violation");
    validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }

    try {
        if (*validate) {
            auto cfg = experiment::load_config(config_path);
            std::cout << "ok: " << cfg.policies.size() << " policies, " << cfg.seeds.size() << " seeds, "
                      << cfg.workload.count << " " << model::to_string(cfg.workload.job_class) << " jobs\n";
            return kOk;
        }
        if (*run) {
            if (quiet) spdlog::set_level(spdlog::level::warn);
            // Overrides are applied to the raw JSON so they go through the same validation.
            std::ifstream in(config_path);
            if (!in) throw GridError("cannot read config " + config_path);
            std::stringstream buf;
            buf << in.rdbuf();
            auto cfg = experiment::parse_config(buf.str());
            auto raw = experiment::to_json(cfg);
            if (!policy_override.empty()) raw["policies"] = split_list(policy_override);
            if (!seeds_override.empty()) {
                raw["seeds"] = nlohmann::json::array();
                for (const auto& s : split_list(seeds_override)) {
                    try {
                        raw["seeds"].push_back(std::stoull(s));
                    } catch (const std::exception&) {
                        throw ValidationError({"--seeds entry '" + s + "' is not an unsigned integer"});
                    }
                }
            }
            if (jobs_override > 0) raw["workload"]["count"] = jobs_override;
            if (nodes_override > 0) {
                raw["platform"]["node_count"] = nodes_override;
                raw.erase("node_counts");
            }
            cfg = experiment::validate_config(raw);
            const std::string dir = out_dir.empty() ? cfg.output_path : out_dir;
            auto results = experiment::run_experiment(cfg, dir);
            std::cout << "wrote " << results.size() << " runs to " << dir << '\n';
            return kOk;
        }
        if (*compare) {
            std::ifstream in(summary_path);
            if (!in) throw GridError("cannot read " + summary_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(std::string("malformed summary: ") + e.what(), 0, 0);
            }
            auto cmp = experiment::compare_policies(experiment::summary_from_json(j));
            std::cout << experiment::format_comparison(cmp);
            if (!plot_path.empty()) {
                std::ofstream plot(plot_path, std::ios::binary);
                if (!plot) throw GridError("cannot write " + plot_path);
                plot << cmp.plot_csv;
            }
            return kOk;
        }
    } catch (const ValidationError& e) {
        return report_invalid(e);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kInvalid;
    } catch (const InvalidSpec& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const IncomparableInput& e) {
        std::cerr << "incomparable input: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
