#include "hybridgrid/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hybridgrid {

namespace {

constexpr Strategy kTableOrder[] = {Strategy::hybrid, Strategy::prob_classical,
                                    Strategy::unrestricted};

int table_rank(Strategy s) {
    for (int i = 0; i < 3; ++i) {
        if (kTableOrder[i] == s) return i;
    }
    return 3;
}

std::string format_display(double x) {
    if (!std::isfinite(x)) return format_full(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", x);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return x;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream s(line);
    for (std::string part; std::getline(s, part, sep);) out.push_back(part);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return format_full(x);
}

double read_number(const nlohmann::json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

std::string spec_header(const GridworldSpec& spec) {
    std::ostringstream s;
    s << "# b=" << spec.base_size() << " d_wall=" << spec.wall_distance() << " side=" << spec.side()
      << " L_min=" << spec.min_length() << "\n";
    return s.str();
}

}  // namespace

IncompleteGrid::IncompleteGrid(std::vector<CellKey> missing)
    : std::runtime_error([&] {
          std::string msg = "incomplete grid, missing " + std::to_string(missing.size()) + " cell(s):";
          for (const auto& k : missing) msg += "\n  " + describe(k);
          return msg;
      }()),
      missing_(std::move(missing)) {}

std::string format_full(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<TableRow> make_table(const std::vector<SummaryStats>& stats) {
    std::set<int> walls;
    std::set<int> bases;
    std::set<int> strategy_ranks;
    std::map<std::tuple<int, int, int>, const SummaryStats*> by_cell;
    for (const auto& s : stats) {
        if (s.key.length || table_rank(s.key.strategy) > 2) continue;
        walls.insert(s.key.wall_distance);
        bases.insert(s.key.base_size);
        strategy_ranks.insert(table_rank(s.key.strategy));
        by_cell[{s.key.wall_distance, table_rank(s.key.strategy), s.key.base_size}] = &s;
    }
    std::vector<CellKey> missing;
    std::vector<TableRow> rows;
    for (int d : walls) {
        for (int rank : strategy_ranks) {
            for (int b : bases) {
                const auto it = by_cell.find({d, rank, b});
                if (it == by_cell.end()) {
                    missing.push_back(CellKey{kTableOrder[rank], b, d, std::nullopt});
                    continue;
                }
                const SummaryStats& s = *it->second;
                rows.push_back(TableRow{d, s.key.strategy, b, s.mean_n_act, s.std_error, false, s.n_errors});
            }
        }
    }
    if (!missing.empty()) throw IncompleteGrid(std::move(missing));

    // One minimum flag per (d_wall, b); ties resolve to the earlier strategy.
    std::map<std::pair<int, int>, TableRow*> best;
    for (auto& row : rows) {
        auto& slot = best[{row.wall_distance, row.base_size}];
        if (std::isnan(row.mean_n_act)) continue;
        if (!slot || row.mean_n_act < slot->mean_n_act) slot = &row;
    }
    for (auto& [cell, row] : best) {
        if (row) row->is_min = true;
    }
    return rows;
}

std::string emit_table(const std::vector<SummaryStats>& stats) {
    std::ostringstream out;
    out << "d_wall,strategy,b,mean_n_act,std_error,is_min,mean_display,std_error_display,n_errors\n";
    for (const auto& row : make_table(stats)) {
        out << row.wall_distance << ',' << to_string(row.strategy) << ',' << row.base_size << ','
            << format_full(row.mean_n_act) << ',' << format_full(row.std_error) << ','
            << (row.is_min ? 1 : 0) << ',' << format_display(row.mean_n_act) << ','
            << format_display(row.std_error) << ',' << row.n_errors << '\n';
    }
    return out.str();
}

std::vector<TableRow> parse_table(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("d_wall,strategy,b,", 0) != 0) {
        throw std::invalid_argument("parse_table: missing header");
    }
    std::vector<TableRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 9) {
            throw std::invalid_argument("parse_table: line " + std::to_string(line_no) +
                                        " has " + std::to_string(f.size()) + " fields, expected 9");
        }
        rows.push_back(TableRow{std::stoi(f[0]), parse_strategy(f[1]), std::stoi(f[2]),
                                parse_double(f[3]), parse_double(f[4]), f[5] == "1",
                                std::stoll(f[8])});
    }
    return rows;
}

std::string emit_histogram(const std::vector<SummaryStats>& stats, const CellKey& cell) {
    const auto it = std::find_if(stats.begin(), stats.end(),
                                 [&](const SummaryStats& s) { return s.key == cell; });
    if (it == stats.end()) {
        throw std::invalid_argument("no cell " + describe(cell) + " in the summary");
    }
    std::ostringstream out;
    out << "# " << describe(cell) << " n_completed=" << it->n_completed
        << (cell.strategy == Strategy::unrestricted ? " bins=[bin,2*bin)" : " bins=exact") << "\n";
    out << "bin,relative_frequency\n";
    for (const auto& [bin, freq] : it->terminal_histogram) {
        out << bin << ',' << format_full(freq) << '\n';
    }
    return out.str();
}

std::string emit_curve(const SuccessCurve& curve) {
    std::ostringstream out;
    out << spec_header(curve.spec);
    std::set<std::string> methods;
    for (const auto& [l, p] : curve.points) methods.insert(to_string(p.method));
    out << "# methods=";
    bool first = true;
    for (const auto& m : methods) {
        out << (first ? "" : "+") << m;
        first = false;
    }
    out << " converged_at=" << (curve.converged_at ? std::to_string(*curve.converged_at) : "none")
        << "\n";
    out << "L,p_init,error,method\n";
    for (const auto& [length, p] : curve.points) {
        double error = 0.0;
        if (p.method == EstimateMethod::monte_carlo && p.n_shots > 0) {
            error = std::sqrt(p.estimate * (1.0 - p.estimate) / static_cast<double>(p.n_shots));
        }
        out << length << ',' << format_full(p.estimate) << ',' << format_full(error) << ','
            << to_string(p.method) << '\n';
    }
    return out.str();
}

std::string emit_fixed_curve(const GridworldSpec& spec, Strategy strategy,
                             const std::vector<FixedLengthPoint>& points) {
    std::ostringstream out;
    out << spec_header(spec);
    out << "# strategy=" << to_string(strategy) << " method="
        << (strategy == Strategy::fixed_hybrid ? "exact_dp" : "walks") << "\n";
    out << "L,mean_n_act,std_error,expected_n_act,p_init,n_errors\n";
    for (const auto& p : points) {
        out << p.length << ',' << format_full(p.stats.mean_n_act) << ','
            << format_full(p.stats.std_error) << ',' << format_full(p.expected_n_act) << ','
            << format_full(p.pinit) << ',' << p.stats.n_errors << '\n';
    }
    return out.str();
}

std::string emit_ratios(const std::vector<SavingsRatio>& ratios) {
    std::ostringstream out;
    out << "d_wall,b,savings_ratio,std_error\n";
    for (const auto& r : ratios) {
        out << r.wall_distance << ',' << r.base_size << ',' << format_full(r.ratio) << ','
            << format_full(r.std_error) << '\n';
    }
    return out.str();
}

std::string emit_runs(const std::vector<RunRecord>& runs) {
    std::ostringstream out;
    out << "strategy,b,d_wall,seed,n_act,terminal_L,success_step,n_aa_rounds,n_doublings,"
           "n_episodes,aa_actions,episode_actions\n";
    for (const auto& r : runs) {
        out << to_string(r.strategy) << ',' << r.spec.base_size() << ',' << r.spec.wall_distance()
            << ',' << r.seed << ',' << r.n_act << ',' << r.terminal_length << ',' << r.success_step
            << ',' << r.n_aa_rounds << ',' << r.n_doublings << ',' << r.n_episodes << ','
            << r.aa_actions << ',' << r.episode_actions << '\n';
    }
    return out.str();
}

std::string emit_summary_json(const std::vector<SummaryStats>& stats) {
    nlohmann::ordered_json doc;
    doc["format"] = "hybridgrid-summary";
    doc["version"] = 1;
    auto& cells = doc["cells"] = nlohmann::ordered_json::array();
    for (const auto& s : stats) {
        nlohmann::ordered_json c;
        c["strategy"] = std::string(to_string(s.key.strategy));
        c["b"] = s.key.base_size;
        c["d_wall"] = s.key.wall_distance;
        c["L"] = s.key.length ? nlohmann::ordered_json(*s.key.length) : nlohmann::ordered_json(nullptr);
        c["mean_n_act"] = number(s.mean_n_act);
        c["std_error"] = number(s.std_error);
        c["mean_terminal_L"] = number(s.mean_terminal_length);
        c["mean_success_step"] = number(s.mean_success_step);
        c["n_runs"] = s.n_runs;
        c["n_completed"] = s.n_completed;
        c["n_errors"] = s.n_errors;
        c["first_error"] = s.first_error;
        c["pinit_source"] = s.pinit_source;
        auto& hist = c["terminal_L_histogram"] = nlohmann::ordered_json::array();
        for (const auto& [bin, freq] : s.terminal_histogram) hist.push_back({bin, freq});
        cells.push_back(std::move(c));
    }
    return doc.dump(2) + "\n";
}

std::vector<SummaryStats> parse_summary_json(const std::string& text) {
    std::vector<SummaryStats> out;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != "hybridgrid-summary") {
            throw std::invalid_argument("not a hybridgrid summary document");
        }
        for (const auto& c : doc.at("cells")) {
            SummaryStats s;
            s.key.strategy = parse_strategy(c.at("strategy").get<std::string>());
            s.key.base_size = c.at("b").get<int>();
            s.key.wall_distance = c.at("d_wall").get<int>();
            if (!c.at("L").is_null()) s.key.length = c.at("L").get<std::int64_t>();
            s.mean_n_act = read_number(c.at("mean_n_act"));
            s.std_error = read_number(c.at("std_error"));
            s.mean_terminal_length = read_number(c.at("mean_terminal_L"));
            s.mean_success_step = read_number(c.at("mean_success_step"));
            s.n_runs = c.at("n_runs").get<std::int64_t>();
            s.n_completed = c.at("n_completed").get<std::int64_t>();
            s.n_errors = c.at("n_errors").get<std::int64_t>();
            s.first_error = c.at("first_error").get<std::string>();
            s.pinit_source = c.at("pinit_source").get<std::string>();
            for (const auto& h : c.at("terminal_L_histogram")) {
                s.terminal_histogram[h.at(0).get<std::int64_t>()] = h.at(1).get<double>();
            }
            out.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed summary document: ") + e.what());
    }
    return out;
}

}  // namespace hybridgrid
