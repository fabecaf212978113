#include "gridsim/experiment/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "gridsim/error.hpp"

namespace gridsim::experiment {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const std::vector<sim::JobRecord>& records, std::uint64_t seed) {
    for (const auto& r : records) {
        out << r.job_id << ',' << r.policy << ',' << model::to_string(r.job_class) << ',' << seed << ','
            << format_double(r.submit_time) << ',' << (r.start_time ? format_double(*r.start_time) : "") << ','
            << (r.end_time ? format_double(*r.end_time) : "") << ',' << r.node_id << ',' << r.origin_subgrid << ','
            << r.exec_subgrid << ',' << r.checkpoints_taken << ',' << r.exports_taken << ','
            << format_double(r.redone_flop) << ',' << r.messages_intra << ',' << r.messages_region << ','
            << r.messages_inter_region << '\n';
    }
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::size_t line, std::size_t col) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("bad CSV field '" + std::string(s) + "' at line " + std::to_string(line), line, col);
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::vector<CsvRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("unexpected CSV header", 1, 1);
    std::vector<CsvRow> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != 16) throw ParseError("expected 16 CSV fields at line " + std::to_string(n), n, 1);
        CsvRow row;
        auto& r = row.record;
        r.job_id = parse_field<JobId>(f[0], n, 1);
        r.policy = std::string(f[1]);
        try {
            r.job_class = model::job_class_from_string(f[2]);
        } catch (const GridError&) {
            throw ParseError("unknown job class at line " + std::to_string(n), n, 3);
        }
        row.seed = parse_field<std::uint64_t>(f[3], n, 4);
        r.submit_time = parse_field<double>(f[4], n, 5);
        if (!f[5].empty()) r.start_time = parse_field<double>(f[5], n, 6);
        if (!f[6].empty()) r.end_time = parse_field<double>(f[6], n, 7);
        r.node_id = parse_field<NodeId>(f[7], n, 8);
        r.origin_subgrid = parse_field<SubgridId>(f[8], n, 9);
        r.exec_subgrid = parse_field<SubgridId>(f[9], n, 10);
        r.checkpoints_taken = parse_field<int>(f[10], n, 11);
        r.exports_taken = parse_field<int>(f[11], n, 12);
        r.redone_flop = parse_field<double>(f[12], n, 13);
        r.messages_intra = parse_field<std::int64_t>(f[13], n, 14);
        r.messages_region = parse_field<std::int64_t>(f[14], n, 15);
        r.messages_inter_region = parse_field<std::int64_t>(f[15], n, 16);
        rows.push_back(std::move(row));
    }
    return rows;
}

SummaryRow summarize(const std::vector<sim::JobRecord>& records, std::string_view policy, std::string_view job_class,
                     std::uint64_t seed, int node_count) {
    SummaryRow s;
    s.policy = policy;
    s.job_class = job_class;
    s.seed = seed;
    s.node_count = node_count;
    std::vector<double> times;
    double sum = 0.0;
    for (const auto& r : records) {
        if (r.completed()) {
            times.push_back(r.completion_time());
            sum += times.back();
            ++s.completed;
        } else {
            ++s.failed;
        }
        s.msgs_intra += r.messages_intra;
        s.msgs_region += r.messages_region;
        s.msgs_inter += r.messages_inter_region;
        s.redone_flop += r.redone_flop;
    }
    if (!times.empty()) {
        s.mean = sum / static_cast<double>(times.size());
        std::sort(times.begin(), times.end());
        const std::size_t n = times.size();
        s.median = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2.0;
        const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
        s.p95 = times[std::max<std::size_t>(rank, 1) - 1];
    }
    return s;
}

std::vector<SummaryRow> summarize_csv(const std::vector<CsvRow>& rows, int node_count) {
    std::map<std::pair<std::string, std::uint64_t>, std::vector<sim::JobRecord>> groups;
    for (const auto& row : rows) groups[{row.record.policy, row.seed}].push_back(row.record);
    std::vector<SummaryRow> out;
    for (auto& [key, records] : groups) {
        std::sort(records.begin(), records.end(),
                  [](const sim::JobRecord& a, const sim::JobRecord& b) { return a.job_id < b.job_id; });
        out.push_back(summarize(records, key.first, model::to_string(records.front().job_class), key.second,
                                node_count));
    }
    return out;
}

json to_json(const std::vector<SummaryRow>& rows) {
    json arr = json::array();
    for (const auto& s : rows) {
        arr.push_back({{"policy", s.policy},
                       {"class", s.job_class},
                       {"seed", s.seed},
                       {"node_count", s.node_count},
                       {"mean", s.mean},
                       {"median", s.median},
                       {"p95", s.p95},
                       {"completed", s.completed},
                       {"failed", s.failed},
                       {"msgs_intra", s.msgs_intra},
                       {"msgs_region", s.msgs_region},
                       {"msgs_inter", s.msgs_inter},
                       {"redone_flop", s.redone_flop}});
    }
    return {{"runs", arr}};
}

std::vector<SummaryRow> summary_from_json(const json& j) {
    std::vector<SummaryRow> out;
    try {
        for (const auto& e : j.at("runs")) {
            SummaryRow s;
            s.policy = e.at("policy").get<std::string>();
            s.job_class = e.at("class").get<std::string>();
            s.seed = e.at("seed").get<std::uint64_t>();
            s.node_count = e.at("node_count").get<int>();
            s.mean = e.at("mean").get<double>();
            s.median = e.at("median").get<double>();
            s.p95 = e.at("p95").get<double>();
            s.completed = e.at("completed").get<std::int64_t>();
            s.failed = e.at("failed").get<std::int64_t>();
            s.msgs_intra = e.at("msgs_intra").get<std::int64_t>();
            s.msgs_region = e.at("msgs_region").get<std::int64_t>();
            s.msgs_inter = e.at("msgs_inter").get<std::int64_t>();
            s.redone_flop = e.at("redone_flop").get<double>();
            out.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("malformed summary: ") + e.what());
    }
    return out;
}

Comparison compare_policies(const std::vector<SummaryRow>& rows) {
    // class -> (node count, seed) -> policy -> mean
    std::map<std::string, std::map<std::pair<int, std::uint64_t>, std::map<std::string, double>>> grid;
    std::set<std::string> all_policies;
    for (const auto& s : rows) {
        // A run that completed nothing ranks last.
        const double mean = s.completed > 0 ? s.mean : std::numeric_limits<double>::infinity();
        auto& cell = grid[s.job_class][{s.node_count, s.seed}];
        if (!cell.emplace(s.policy, mean).second)
            throw IncomparableInput("duplicate summary for policy " + s.policy + ", seed " + std::to_string(s.seed));
        all_policies.insert(s.policy);
    }
    if (grid.empty()) throw IncomparableInput("no summaries to compare");

    Comparison out;
    std::ostringstream plot;
    plot << "class,x";
    for (const auto& p : all_policies) plot << ',' << p;
    plot << '\n';

    for (const auto& [cls, instances] : grid) {
        ClassComparison cc;
        cc.job_class = cls;
        std::set<std::string> policies;
        for (const auto& [key, cell] : instances)
            for (const auto& [p, m] : cell) policies.insert(p);
        cc.policies.assign(policies.begin(), policies.end());
        if (cc.policies.size() < 2)
            throw IncomparableInput("class " + cls + " needs at least two policies to compare");
        for (const auto& [key, cell] : instances) {
            if (cell.size() != policies.size())
                throw IncomparableInput("class " + cls + ": policies were not run on the same seeds (seed " +
                                        std::to_string(key.second) + ")");
        }
        for (const auto& a : cc.policies) {
            cc.wins[a] = 0;
            for (const auto& b : cc.policies)
                if (a != b) cc.beats[a][b] = 0;
        }
        std::set<int> node_counts;
        for (const auto& [key, cell] : instances) {
            node_counts.insert(key.first);
            ++cc.instances;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [p, m] : cell) best = std::min(best, m);
            std::vector<std::string> at_best;
            for (const auto& [p, m] : cell)
                if (m == best) at_best.push_back(p);
            if (at_best.size() == 1) {
                ++cc.wins[at_best.front()];
            } else {
                ++cc.ties;
            }
            for (const auto& [a, ma] : cell)
                for (const auto& [b, mb] : cell)
                    if (a != b && ma < mb) ++cc.beats[a][b];
        }

        auto emit = [&](const std::string& x, const std::map<std::string, double>& ys) {
            plot << cls << ',' << x;
            for (const auto& p : all_policies) {
                plot << ',';
                if (auto it = ys.find(p); it != ys.end()) plot << format_double(it->second);
            }
            plot << '\n';
        };
        if (node_counts.size() > 1) {
            for (int n : node_counts) {
                std::map<std::string, double> sums;
                std::map<std::string, int> counts;
                for (const auto& [key, cell] : instances) {
                    if (key.first != n) continue;
                    for (const auto& [p, m] : cell) {
                        sums[p] += m;
                        ++counts[p];
                    }
                }
                for (auto& [p, v] : sums) v /= counts[p];
                emit(std::to_string(n), sums);
            }
        } else {
            for (const auto& [key, cell] : instances) emit(std::to_string(key.second), cell);
        }
        out.classes.push_back(std::move(cc));
    }
    out.plot_csv = plot.str();
    return out;
}

std::string format_comparison(const Comparison& c) {
    std::ostringstream out;
    for (const auto& cc : c.classes) {
        out << "class " << cc.job_class << " (" << cc.instances << " instances)\n";
        out << "  wins:";
        for (const auto& p : cc.policies) out << ' ' << p << ' ' << cc.wins.at(p) << '/' << cc.instances;
        out << ", ties " << cc.ties << '\n';
        out << "  row beats column:\n        ";
        for (const auto& p : cc.policies) out << ' ' << std::string(std::max<int>(0, 6 - static_cast<int>(p.size())), ' ') << p;
        out << '\n';
        for (const auto& a : cc.policies) {
            out << "  " << a << std::string(std::max<int>(0, 6 - static_cast<int>(a.size())), ' ');
            for (const auto& b : cc.policies) {
                std::string cell = a == b ? "-" : std::to_string(cc.beats.at(a).at(b));
                out << ' ' << std::string(std::max<int>(0, 6 - static_cast<int>(cell.size())), ' ') << cell;
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace gridsim::experiment
