#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hybridgrid/reporting.hpp"

using namespace hybridgrid;

namespace {

SummaryStats cell(Strategy s, int b, int d, double mean, double se) {
    SummaryStats st;
    st.key = {s, b, d, std::nullopt};
    st.mean_n_act = mean;
    st.std_error = se;
    st.n_runs = st.n_completed = 10000;
    st.terminal_histogram = {{32, 0.25}, {64, 0.75}};
    st.pinit_source = "exact_dp";
    return st;
}

// Reference results excerpt for d_wall = 16 and the d_wall = 0 unrestricted row.
std::vector<SummaryStats> appendix_shaped() {
    std::vector<SummaryStats> out;
    const int bases[] = {5, 6, 7, 8, 9};
    for (int d : {0, 4, 8, 16, 32, 64}) {
        for (int i = 0; i < 5; ++i) {
            const int b = bases[i];
            out.push_back(cell(Strategy::hybrid, b, d, 300.0 + 100 * i + d, 2.0 + i / 3.0));
            out.push_back(cell(Strategy::prob_classical, b, d, 310.0 + 150 * i + 3 * d, 2.0));
            out.push_back(cell(Strategy::unrestricted, b, d, 106.0 + 70 * i + 60 * d, 1.0));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("format_full") {
    CHECK(format_full(0.1) == "0.10000000000000001");
    CHECK(format_full(std::nan("")) == "nan");
    CHECK(format_full(-INFINITY) == "-inf");
    CHECK(std::stod(format_full(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("table shape, ordering and minimum flags") {
    auto stats = appendix_shaped();
    const std::string text = emit_table(stats);
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    CHECK(header == "d_wall,strategy,b,mean_n_act,std_error,is_min,mean_display,std_error_display,n_errors");
    const auto rows = parse_table(text);
    REQUIRE(rows.size() == 90);
    CHECK(rows[0].wall_distance == 0);
    CHECK(rows[0].strategy == Strategy::hybrid);
    CHECK(rows[0].base_size == 5);
    CHECK(rows[5].strategy == Strategy::prob_classical);
    CHECK(rows[89].wall_distance == 64);
    CHECK(rows[89].strategy == Strategy::unrestricted);
    CHECK(rows[89].base_size == 9);

    std::map<std::pair<int, int>, int> flags;
    for (const auto& r : rows) flags[{r.wall_distance, r.base_size}] += r.is_min;
    for (const auto& [k, n] : flags) CHECK(n == 1);

    // Shuffling the input changes nothing.
    std::reverse(stats.begin(), stats.end());
    CHECK(emit_table(stats) == text);
}

TEST_CASE("results table minimum flags") {
    std::vector<SummaryStats> stats{
        cell(Strategy::hybrid, 5, 16, 483, 3), cell(Strategy::prob_classical, 5, 16, 795, 7),
        cell(Strategy::unrestricted, 5, 16, 2950, 34), cell(Strategy::hybrid, 9, 0, 2071, 14),
        cell(Strategy::prob_classical, 9, 0, 1724, 9), cell(Strategy::unrestricted, 9, 0, 472, 4),
        cell(Strategy::hybrid, 5, 0, 300, 2), cell(Strategy::prob_classical, 5, 0, 310, 2),
        cell(Strategy::unrestricted, 5, 0, 106, 1), cell(Strategy::hybrid, 9, 16, 2934, 17),
        cell(Strategy::prob_classical, 9, 16, 4442, 34), cell(Strategy::unrestricted, 9, 16, 4406, 45),
    };
    for (const auto& r : make_table(stats)) {
        if (r.wall_distance == 16 && r.base_size == 5) CHECK(r.is_min == (r.strategy == Strategy::hybrid));
        if (r.wall_distance == 0 && r.base_size == 9) {
            CHECK(r.is_min == (r.strategy == Strategy::unrestricted));
        }
    }
}

TEST_CASE("round trip is exact") {
    auto stats = appendix_shaped();
    stats[3].mean_n_act = 1234.5678901234567;
    stats[3].std_error = std::nextafter(3.0, 4.0);
    stats[7].std_error = std::nan("");
    const auto rows = parse_table(emit_table(stats));
    const auto table = make_table(stats);
    REQUIRE(rows.size() == table.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].mean_n_act == table[i].mean_n_act);
        if (std::isnan(table[i].std_error)) {
            CHECK(std::isnan(rows[i].std_error));
        } else {
            CHECK(rows[i].std_error == table[i].std_error);
        }
        CHECK(rows[i].is_min == table[i].is_min);
    }
    CHECK_THROWS_AS(parse_table("nope\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_table("d_wall,strategy,b,mean_n_act\n0,hybrid\n"), std::invalid_argument);
}

TEST_CASE("incomplete grid lists the missing cells") {
    auto stats = appendix_shaped();
    stats.erase(stats.begin() + 4);
    try {
        emit_table(stats);
        FAIL("expected IncompleteGrid");
    } catch (const IncompleteGrid& e) {
        REQUIRE(e.missing().size() == 1);
        CHECK(e.missing()[0] == CellKey{Strategy::prob_classical, 6, 0, std::nullopt});
        CHECK(std::string(e.what()).find("prob-classical b=6 d_wall=0") != std::string::npos);
    }
}

TEST_CASE("histogram output") {
    const auto stats = appendix_shaped();
    const std::string text = emit_histogram(stats, {Strategy::hybrid, 5, 0, std::nullopt});
    CHECK(text.find("bin,relative_frequency\n32,0.25\n64,0.75\n") != std::string::npos);
    CHECK_THROWS_AS(emit_histogram(stats, {Strategy::hybrid, 4, 0, std::nullopt}), std::invalid_argument);
}

TEST_CASE("curve output") {
    Rng rng = make_rng(0);
    CurveOptions opts;
    opts.max_length = 256;
    const SuccessCurve c = build_curve(GridworldSpec(5, 0), rng, opts);
    const std::string text = emit_curve(c);
    CHECK(text.rfind("# b=5 d_wall=0", 0) == 0);
    CHECK(text.find("methods=exact_dp") != std::string::npos);
    std::istringstream in(text);
    std::string line;
    double previous = -1.0;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'L') continue;
        std::stringstream fields(line);
        std::string l, p;
        std::getline(fields, l, ',');
        std::getline(fields, p, ',');
        CHECK(std::stod(p) >= previous);
        previous = std::stod(p);
        ++rows;
    }
    CHECK(rows == static_cast<int>(c.points.size()));
    const std::string lin = emit_curve(interpolate(c, {8, 12, 16}));
    CHECK(lin.find("12,") != std::string::npos);
    CHECK(lin.find(",interpolated") != std::string::npos);
}

TEST_CASE("summary document round trip") {
    auto stats = appendix_shaped();
    stats[0].std_error = std::nan("");
    stats[1].n_errors = 2;
    stats[1].first_error = "cap \"quoted\"";
    stats[2].key.length = 34;
    const std::string json = emit_summary_json(stats);
    const auto back = parse_summary_json(json);
    REQUIRE(back.size() == stats.size());
    CHECK(std::isnan(back[0].std_error));
    for (std::size_t i = 1; i < stats.size(); ++i) CHECK(back[i] == stats[i]);
    CHECK(emit_summary_json(back) == json);
    CHECK_THROWS_AS(parse_summary_json("{\"format\": \"other\"}"), std::invalid_argument);
    CHECK_THROWS_AS(parse_summary_json("[1,"), std::invalid_argument);
}

TEST_CASE("ratios and runs") {
    const std::vector<SavingsRatio> r{{5, 64, 0.42, 0.01}};
    CHECK(emit_ratios(r) == "d_wall,b,savings_ratio,std_error\n64,5,0.41999999999999998,0.01\n");
    RunRecord rec;
    rec.n_act = rec.terminal_length = rec.success_step = 2;
    rec.strategy = Strategy::unrestricted;
    CHECK(emit_runs({rec}).find("\nunrestricted,2,0,0,2,2,2,0,0,0,0,0\n") != std::string::npos);
}
