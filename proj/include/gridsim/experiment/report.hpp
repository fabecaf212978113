#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridsim/sim/job_record.hpp"

namespace gridsim::experiment {

inline constexpr std::string_view kCsvHeader =
    "job_id,policy,class,seed,submit_t,start_t,end_t,node_id,origin_subgrid,exec_subgrid,"
    "checkpoints,exports,redone_flop,msgs_intra,msgs_region,msgs_inter";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::vector<sim::JobRecord>& records, std::uint64_t seed);

struct CsvRow {
    sim::JobRecord record;
    std::uint64_t seed = 0;
};

/// Throws ParseError on a wrong header or malformed row.
std::vector<CsvRow> read_csv(std::istream& in);

struct SummaryRow {
    std::string policy;
    std::string job_class;
    std::uint64_t seed = 0;
    int node_count = 0;
    double mean = 0.0;    // completion time from submission, completed jobs only
    double median = 0.0;
    double p95 = 0.0;
    std::int64_t completed = 0;
    std::int64_t failed = 0;
    std::int64_t msgs_intra = 0;   // summed per-job counters
    std::int64_t msgs_region = 0;
    std::int64_t msgs_inter = 0;
    double redone_flop = 0.0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Records of one run, in job-id order.
SummaryRow summarize(const std::vector<sim::JobRecord>& records, std::string_view policy, std::string_view job_class,
                     std::uint64_t seed, int node_count);

/// Groups CSV rows by (policy, seed) and summarizes each group.
std::vector<SummaryRow> summarize_csv(const std::vector<CsvRow>& rows, int node_count);

nlohmann::json to_json(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> summary_from_json(const nlohmann::json& j);

struct ClassComparison {
    std::string job_class;
    std::vector<std::string> policies;             // sorted
    int instances = 0;                             // (node count, seed) pairs compared
    std::map<std::string, int> wins;               // strictly lowest mean
    int ties = 0;                                  // lowest mean shared, no winner
    std::map<std::string, std::map<std::string, int>> beats;  // beats[a][b]: a's mean < b's mean
};

struct Comparison {
    std::vector<ClassComparison> classes;
    std::string plot_csv;  // class,x,<policy...>; x is the seed, or the node count for sweeps
};

/// Throws IncomparableInput if fewer than two policies are present or the
/// policies were not run on the same (node count, seed) grid.
Comparison compare_policies(const std::vector<SummaryRow>& rows);

std::string format_comparison(const Comparison& c);

}  // namespace gridsim::experiment
