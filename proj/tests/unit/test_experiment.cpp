#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gridsim/error.hpp"
#include "gridsim/experiment/config.hpp"
#include "gridsim/experiment/report.hpp"
#include "gridsim/experiment/runner.hpp"

using namespace gridsim;
using namespace gridsim::experiment;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json small_config() {
    return json::parse(R"({
      "platform": {"node_count": 50, "capability_range": [1e6, 1e8], "bandwidth_range": [1e6, 8e7],
                   "latency_range": [0.001, 0.05], "storage_range": [1e10, 1e12],
                   "rtt_threshold": 0.08, "region_proximity_threshold": 0.2, "rng_seed": 0},
      "workload": {"class": "hybrid", "count": 100, "submit_policy": {"kind": "all-at-t0"}},
      "policies": ["ncda", "flops", "rr"],
      "failure_schedule": null,
      "erasure": {"k": 2, "n": 4},
      "checkpoint": null,
      "seeds": [1, 2, 3],
      "output_path": "unused"
    })");
}

fs::path scratch_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gridsim_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> violations_of(const json& raw) {
    try {
        validate_config(raw);
    } catch (const ValidationError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

SummaryRow row(std::string policy, std::uint64_t seed, double mean, int nodes = 100, std::string cls = "hybrid") {
    SummaryRow r;
    r.policy = std::move(policy);
    r.job_class = std::move(cls);
    r.seed = seed;
    r.node_count = nodes;
    r.mean = mean;
    r.completed = 10;
    return r;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GRIDSIM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, SmallConfigIsValidAndRoundTrips) {
    auto cfg = validate_config(small_config());
    EXPECT_EQ(cfg.policies.size(), 3u);
    EXPECT_EQ(cfg.sweep(), std::vector<int>{50});
    auto again = validate_config(to_json(cfg));
    EXPECT_EQ(to_json(again), to_json(cfg));
}

TEST(Config, RejectsDivergentSmoothingWeight) {
    auto raw = small_config();
    raw["checkpoint"] = {{"W", 2.5}, {"I0", 10}, {"I1", 10}};
    auto v = violations_of(raw);
    EXPECT_TRUE(mentions(v, "outside (0,2) convergence domain"));
}

TEST(Config, RejectsMoreDataSharesThanShares) {
    auto raw = small_config();
    raw["erasure"] = {{"k", 5}, {"n", 3}};
    EXPECT_TRUE(mentions(violations_of(raw), "ErasureParams"));
}

TEST(Config, ReportsEveryViolationAtOnce) {
    auto raw = small_config();
    raw["erasure"] = {{"k", 5}, {"n", 3}};
    raw["policies"] = {"ncda", "random"};
    raw["platform"]["node_count"] = 0;
    raw["seeds"] = json::array();
    raw["surprise"] = 1;
    auto v = violations_of(raw);
    EXPECT_GE(v.size(), 5u);
    EXPECT_TRUE(mentions(v, "random"));
    EXPECT_TRUE(mentions(v, "surprise"));
}

TEST(Config, RejectsScheduleBeyondPlatform) {
    auto raw = small_config();
    raw["failure_schedule"] = {{"entries", {{{"node", 70}, {"fail_time", 1.0}, {"recover_time", 2.0}}}}};
    EXPECT_FALSE(violations_of(raw).empty());
    raw["failure_schedule"] = {{"entries", {{{"node", 3}, {"fail_time", 5.0}, {"recover_time", 2.0}}}}};
    EXPECT_FALSE(violations_of(raw).empty());
}

TEST(Config, ParseErrorCarriesPosition) {
    try {
        parse_config("{\n  \"seeds\": [1,\n  ]\n}");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_GE(e.column(), 1u);
    }
}

TEST(Config, ShippedRecipesAreValid) {
    for (const char* name : {"fig3_network.json", "fig4_compute.json", "fig5_hybrid.json", "selfheal_demo.json"}) {
        EXPECT_NO_THROW(load_config(fs::path(GRIDSIM_RECIPES_DIR) / name)) << name;
    }
    auto fig3 = load_config(fs::path(GRIDSIM_RECIPES_DIR) / "fig3_network.json");
    EXPECT_EQ(fig3.workload.job_class, model::JobClass::Network);
    EXPECT_EQ(fig3.seeds.size(), 10u);
}

TEST(Csv, GoldenHeaderAndFormatting) {
    sim::JobRecord r;
    r.job_id = 3;
    r.policy = "ncda";
    r.job_class = model::JobClass::Hybrid;
    r.submit_time = 0.5;
    r.start_time = 1.25;
    r.node_id = 7;
    r.origin_subgrid = 1;
    r.exec_subgrid = 2;
    r.messages_intra = 4;
    std::ostringstream out;
    write_csv_header(out);
    write_csv_rows(out, {r}, 9);
    EXPECT_EQ(out.str(),
              "job_id,policy,class,seed,submit_t,start_t,end_t,node_id,origin_subgrid,exec_subgrid,"
              "checkpoints,exports,redone_flop,msgs_intra,msgs_region,msgs_inter\n"
              "3,ncda,hybrid,9,0.5,1.25,,7,1,2,0,0,0,4,0,0\n");
    std::istringstream in(out.str());
    auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].seed, 9u);
    EXPECT_FALSE(rows[0].record.end_time.has_value());
    EXPECT_EQ(*rows[0].record.start_time, 1.25);

    std::istringstream bad("job_id,policy\n1,ncda\n");
    EXPECT_THROW(read_csv(bad), ParseError);
}

TEST(Summary, StatisticsOracle) {
    std::vector<sim::JobRecord> recs;
    for (int i = 0; i < 5; ++i) {
        sim::JobRecord r;
        r.job_id = i;
        r.submit_time = 1.0;
        r.start_time = 1.0;
        r.end_time = 1.0 + (i + 1) * 10.0;  // 10..50
        recs.push_back(r);
    }
    sim::JobRecord lost;
    lost.job_id = 5;
    recs.push_back(lost);
    auto s = summarize(recs, "rr", "compute", 4, 10);
    EXPECT_DOUBLE_EQ(s.mean, 30.0);
    EXPECT_DOUBLE_EQ(s.median, 30.0);
    EXPECT_DOUBLE_EQ(s.p95, 50.0);
    EXPECT_EQ(s.completed, 5);
    EXPECT_EQ(s.failed, 1);

    recs.pop_back();
    recs.pop_back();
    auto even = summarize(recs, "rr", "compute", 4, 10);
    EXPECT_DOUBLE_EQ(even.median, 25.0);
}

TEST(Experiment, ProducesAllRunsDeterministically) {
    auto cfg = validate_config(small_config());
    const auto a = scratch_dir("runA"), b = scratch_dir("runB");
    auto results = run_experiment(cfg, a);
    run_experiment(cfg, b);
    ASSERT_EQ(results.size(), 9u);

    const auto csv = slurp(a / "jobs.csv");
    std::istringstream in(csv);
    auto rows = read_csv(in);
    EXPECT_EQ(rows.size(), 900u);
    EXPECT_EQ(csv.substr(0, kCsvHeader.size()), kCsvHeader);
    EXPECT_EQ(csv, slurp(b / "jobs.csv"));
    EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
    EXPECT_TRUE(fs::exists(a / "plot.csv"));

    // The summary is a pure function of the CSV.
    auto from_csv = summarize_csv(rows, 50);
    auto written = summary_from_json(json::parse(slurp(a / "summary.json")));
    EXPECT_EQ(from_csv, written);

    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Experiment, SeedsAreIsolated) {
    auto raw = small_config();
    raw["policies"] = {"ncda"};
    raw["workload"]["count"] = 30;
    raw["seeds"] = json::array({1, 2, 3});
    auto all = run_all(validate_config(raw));
    raw["seeds"] = json::array({2});
    auto only = run_all(validate_config(raw));
    ASSERT_EQ(all.size(), 3u);
    ASSERT_EQ(only.size(), 1u);
    ASSERT_EQ(all[1].records.size(), only[0].records.size());
    for (std::size_t i = 0; i < only[0].records.size(); ++i) {
        EXPECT_EQ(all[1].records[i].end_time, only[0].records[i].end_time);
        EXPECT_EQ(all[1].records[i].node_id, only[0].records[i].node_id);
    }
}

TEST(Experiment, UnwritableOutputFailsBeforeSimulating) {
    const auto dir = scratch_dir("blocked");
    fs::create_directories(dir);
    { std::ofstream(dir / "file") << "x"; }
    auto cfg = validate_config(small_config());
    EXPECT_THROW(run_experiment(cfg, dir / "file" / "out"), GridError);
    EXPECT_FALSE(fs::exists(dir / "file" / "out"));
    fs::remove_all(dir);
}

TEST(Compare, CountsWins) {
    std::vector<SummaryRow> rows;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        rows.push_back(row("ncda", s, 100.0));
        rows.push_back(row("flops", s, 200.0));
        rows.push_back(row("rr", s, 300.0));
    }
    auto c = compare_policies(rows);
    ASSERT_EQ(c.classes.size(), 1u);
    const auto& h = c.classes[0];
    EXPECT_EQ(h.instances, 10);
    EXPECT_EQ(h.wins.at("ncda"), 10);
    EXPECT_EQ(h.beats.at("flops").at("rr"), 10);
    EXPECT_NE(format_comparison(c).find("ncda"), std::string::npos);
    EXPECT_EQ(c.plot_csv.substr(0, c.plot_csv.find('\n')), "class,x,flops,ncda,rr");
}

TEST(Compare, TiesAndZeroCompletions) {
    std::vector<SummaryRow> rows = {row("ncda", 1, 50.0), row("flops", 1, 50.0), row("ncda", 2, 80.0),
                                    row("flops", 2, 10.0)};
    rows[3].completed = 0;  // no completions compares as +inf
    auto c = compare_policies(rows);
    const auto& h = c.classes[0];
    EXPECT_EQ(h.ties, 1);
    EXPECT_EQ(h.wins.count("flops") ? h.wins.at("flops") : 0, 0);
    EXPECT_EQ(h.wins.at("ncda"), 1);
}

TEST(Compare, RejectsIncomparableInput) {
    EXPECT_THROW(compare_policies({row("ncda", 1, 1.0), row("ncda", 2, 1.0)}), IncomparableInput);
    EXPECT_THROW(compare_policies({row("ncda", 1, 1.0), row("flops", 2, 1.0)}), IncomparableInput);
    EXPECT_THROW(compare_policies({row("ncda", 1, 1.0), row("ncda", 1, 2.0), row("flops", 1, 1.0)}),
                 IncomparableInput);
    EXPECT_THROW(summary_from_json(json::parse(R"({"runs": [{"policy": 3}]})")), InvalidSpec);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli");
    fs::create_directories(dir);
    const fs::path recipe = fs::path(GRIDSIM_RECIPES_DIR) / "fig5_hybrid.json";
    EXPECT_EQ(run_cli("validate --config " + recipe.string()), 0);

    auto bad = small_config();
    bad["checkpoint"] = {{"W", 2.5}};
    { std::ofstream(dir / "bad.json") << bad.dump(); }
    EXPECT_EQ(run_cli("validate --config " + (dir / "bad.json").string()), 1);
    { std::ofstream(dir / "broken.json") << "{ \"seeds\": [1,"; }
    EXPECT_EQ(run_cli("validate --config " + (dir / "broken.json").string()), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);

    const auto out = dir / "out";
    EXPECT_EQ(run_cli("run --quiet --config " + recipe.string() + " --out " + out.string() +
                      " --seeds 1,2 --jobs 20 --nodes 20"),
              0);
    EXPECT_TRUE(fs::exists(out / "summary.json"));
    EXPECT_EQ(run_cli("compare --in " + (out / "summary.json").string()), 0);
    EXPECT_EQ(run_cli("run --config " + recipe.string() + " --policy random"), 1);

    { std::ofstream(dir / "blocker") << "x"; }
    EXPECT_EQ(run_cli("run --quiet --config " + recipe.string() + " --out " + (dir / "blocker" / "o").string() +
                      " --seeds 1 --jobs 5 --nodes 5"),
              2);
    { std::ofstream(dir / "one.json") << R"({"runs": [{"policy": "ncda", "class": "hybrid", "seed": 1,
        "node_count": 5, "mean": 1, "median": 1, "p95": 1, "completed": 1, "failed": 0, "msgs_intra": 0,
        "msgs_region": 0, "msgs_inter": 0, "redone_flop": 0}]})"; }
    EXPECT_EQ(run_cli("compare --in " + (dir / "one.json").string()), 1);
    EXPECT_EQ(run_cli("compare --in " + (dir / "missing.json").string()), 2);
    fs::remove_all(dir);
}
