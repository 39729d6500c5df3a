#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "hybridgrid/experiment.hpp"

using namespace hybridgrid;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.base_sizes = {3, 4};
    c.wall_distances = {0, 2};
    c.n_runs = 300;
    c.seed_base = 42;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("config validation names the field") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.n_runs = 0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("n_runs"), std::invalid_argument);
    c = {};
    c.base_sizes = {1};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("base_sizes"), std::invalid_argument);
    c = {};
    c.curve.mc.shot_cap = c.curve.mc.batch_size + 1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("shot_cap"), std::invalid_argument);
    c = {};
    c.strategies.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("seeds are distinct over the full default grid") {
    const ExperimentConfig c;
    std::unordered_set<std::uint32_t> codes;
    std::unordered_set<std::uint64_t> seeds;
    std::size_t expected = 0;
    for (Strategy s : c.strategies) {
        for (int b : c.base_sizes) {
            for (int d : c.wall_distances) {
                const CellKey key{s, b, d, std::nullopt};
                CHECK(codes.insert(cell_code(key)).second);
                for (std::int64_t i = 0; i < c.n_runs; ++i) seeds.insert(run_seed(c.seed_base, key, i));
                expected += static_cast<std::size_t>(c.n_runs);
            }
        }
    }
    CHECK(seeds.size() == expected);
    for (Strategy s : {Strategy::fixed_hybrid, Strategy::fixed_classical}) {
        for (std::int64_t l : default_fixed_grid(GridworldSpec(7, 16))) {
            CHECK(codes.insert(cell_code({s, 7, 16, l})).second);
        }
    }
}

TEST_CASE("histogram bins") {
    CHECK(histogram_bin(Strategy::hybrid, 64) == 64);
    CHECK(histogram_bin(Strategy::prob_classical, 128) == 128);
    CHECK(histogram_bin(Strategy::fixed_classical, 34) == 34);
    CHECK(histogram_bin(Strategy::unrestricted, 1) == 1);
    CHECK(histogram_bin(Strategy::unrestricted, 4096) == 4096);
    CHECK(histogram_bin(Strategy::unrestricted, 8191) == 4096);
    CHECK(histogram_bin(Strategy::unrestricted, 8192) == 8192);
    CHECK(histogram_bin(Strategy::unrestricted, 40000) == 32768);
}

TEST_CASE("summarize") {
    const GridworldSpec s(3, 0);
    const CellKey key{Strategy::unrestricted, 3, 0, std::nullopt};
    std::vector<RunResult> runs;
    for (std::int64_t n : {4, 6, 8, 13}) {
        RunRecord r;
        r.strategy = Strategy::unrestricted;
        r.spec = s;
        r.n_act = r.terminal_length = r.success_step = n;
        runs.push_back({r, ""});
    }
    runs.push_back({std::nullopt, "capped"});
    const SummaryStats st = summarize(key, runs);
    CHECK(st.n_runs == 5);
    CHECK(st.n_completed == 4);
    CHECK(st.n_errors == 1);
    CHECK(st.first_error == "capped");
    CHECK(st.mean_n_act == doctest::Approx(7.75));
    CHECK(st.std_error == doctest::Approx(std::sqrt(((3.75 * 3.75) + (1.75 * 1.75) + 0.0625 + 5.25 * 5.25) / 3 / 4)));
    CHECK(st.terminal_histogram.at(4) == 0.5);
    CHECK(st.terminal_histogram.at(8) == 0.5);

    const SummaryStats one = summarize(key, {runs[0]});
    CHECK(std::isnan(one.std_error));
    const SummaryStats none = summarize(key, {runs[4]});
    CHECK(std::isnan(none.mean_n_act));
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
    for (int threads : {1, 2, 5}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(1000, threads, [&](std::int64_t i) { ++hits[static_cast<std::size_t>(i)]; });
        for (auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(100, threads,
                                     [](std::int64_t i) {
                                         if (i == 37) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
    CHECK(effective_threads(3) == 3);
    CHECK(effective_threads(0) >= 1);
}

TEST_CASE("sweep results do not depend on scheduling") {
    ExperimentConfig c = tiny_config();
    c.record_runs = true;
    CurveStore a(c.curve, std::nullopt);
    const SweepResult one = run_sweep(c, a);
    c.threads = 4;
    CurveStore b(c.curve, std::nullopt);
    const SweepResult four = run_sweep(c, b);
    CHECK(one.cells == four.cells);
    CHECK(one.runs == four.runs);
    REQUIRE(one.cells.size() == 12);
    CHECK(one.runs.size() == 12 * 300);
    CHECK(one.cells.front().key == CellKey{Strategy::hybrid, 3, 0, std::nullopt});
    CHECK(one.cells.back().key == CellKey{Strategy::unrestricted, 4, 2, std::nullopt});
    for (const auto& cell : one.cells) {
        CHECK(cell.n_errors == 0);
        double total = 0.0;
        for (const auto& [bin, f] : cell.terminal_histogram) {
            total += f;
            if (cell.key.strategy != Strategy::unrestricted) CHECK((bin & (bin - 1)) == 0);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cell.pinit_source == (cell.key.strategy == Strategy::hybrid ? "exact_dp" : "walks"));
    }
    c.seed_base = 43;
    CurveStore d(c.curve, std::nullopt);
    CHECK_FALSE(run_sweep(c, d).cells == one.cells);
}

TEST_CASE("sweep subsets and fixed strategies") {
    ExperimentConfig c = tiny_config();
    c.strategies = {Strategy::hybrid, Strategy::prob_classical, Strategy::fixed_hybrid};
    c.base_sizes = {4};
    c.wall_distances = {2};
    CurveStore store(c.curve, std::nullopt);
    const SweepResult r = run_sweep(c, store);
    REQUIRE(r.cells.size() == 2);
    CHECK(r.cells[1].key.strategy == Strategy::prob_classical);
    CHECK(r.runs.empty());
}

TEST_CASE("curve store caches to disk") {
    const fs::path dir = fs::temp_directory_path() / "hybridgrid-tests" / "store";
    fs::remove_all(dir);
    CurveOptions opts;
    opts.max_length = 128;
    const GridworldSpec s(3, 1);
    {
        CurveStore store(opts, dir);
        store.prepare({s, s}, 2);
        CHECK(store.oracle(s).pinit(4) == doctest::Approx(exact_dp(s, 4)));
        REQUIRE(store.log().size() == 1);
        CHECK(store.log()[0].rfind("built", 0) == 0);
    }
    {
        CurveStore store(opts, dir, false);
        store.oracle(s);
        CHECK(store.log()[0].rfind("cache hit", 0) == 0);
        CHECK_THROWS_AS(store.oracle(GridworldSpec(3, 2)), CacheNotFound);
    }
    CurveStore no_dir(opts, std::nullopt, false);
    CHECK_THROWS_AS(no_dir.oracle(s), CacheNotFound);
}

TEST_CASE("default fixed grid") {
    const GridworldSpec s(7, 16);
    const auto grid = default_fixed_grid(s);
    CHECK(grid.size() == 868);
    CHECK(grid.front() == 12);
    CHECK(grid.back() == 16384);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
    CHECK(default_fixed_grid(GridworldSpec(2, 0), 1000, 10).size() == 9);
    CHECK_THROWS_AS(default_fixed_grid(s, 10, 5), std::invalid_argument);
}

TEST_CASE("fixed-length hybrid expectation against a round-by-round sum") {
    const auto brute = [](double p, double hit_mean, std::int64_t l) {
        double m = 1.0;
        double reach = 1.0;
        double total = 0.0;
        const double m_max = std::ldexp(1.0, static_cast<int>(l));
        for (int round = 0; round < 400 && reach > 1e-15; ++round) {
            const std::int64_t n = iteration_choices(m, IterationBound::floor);
            double success = 0.0;
            double cost = 0.0;
            for (std::int64_t k = 0; k < n; ++k) {
                const double a = amplified_probability(p, k);
                success += a / static_cast<double>(n);
                cost += (2.0 * static_cast<double>(k * l) + a * hit_mean + (1.0 - a) * static_cast<double>(l)) /
                        static_cast<double>(n);
            }
            total += reach * cost;
            reach *= 1.0 - success;
            m = std::min(1.25 * m, m_max);
        }
        return total;
    };
    for (auto [p, l] : {std::pair{5.5e-5, std::int64_t{12}}, {3e-3, 24}, {0.02, 48}, {0.4, 200}}) {
        CHECK(expected_fixed_length_hybrid(p, 0.9 * static_cast<double>(l), l) ==
              doctest::Approx(brute(p, 0.9 * static_cast<double>(l), l)).epsilon(1e-6));
    }
}

TEST_CASE("fixed-length expectations") {
    CHECK(expected_fixed_length_hybrid(1.0, 3.0, 8) == doctest::Approx(3.0));
    CHECK(std::isinf(expected_fixed_length_hybrid(0.0, 0.0, 8)));
    const GridworldSpec two(2, 0);
    const auto hits = first_hit_distribution(two, 2);
    CHECK(std::isinf(expected_fixed_length_classical(hits, 1)));
    CHECK_THROWS_AS(expected_fixed_length_classical(hits, 3), std::out_of_range);
}

TEST_CASE("fixed-length curves for b=7, d_wall=16") {
    const GridworldSpec s(7, 16);
    const auto grid = default_fixed_grid(s);
    const auto hits = first_hit_distribution(s, grid.back());
    std::vector<double> hybrid;
    std::vector<double> classical;
    for (auto l : grid) {
        hybrid.push_back(expected_fixed_length_hybrid(hits.cumulative(l), hits.conditional_mean(l), l));
        classical.push_back(expected_fixed_length_classical(hits, l));
    }
    const auto best = std::min_element(hybrid.begin(), hybrid.end()) - hybrid.begin();
    CHECK(grid[static_cast<std::size_t>(best)] > 32);
    CHECK(grid[static_cast<std::size_t>(best)] < 64);
    CHECK(classical[0] > hybrid[0]);
    bool crossed = false;
    for (std::size_t i = 0; i < grid.size(); ++i) crossed |= hybrid[i] > classical[i];
    CHECK(crossed);
    CHECK(hybrid.back() / classical.back() == doctest::Approx(1.0).epsilon(0.05));
    for (std::int64_t l = 13; l <= 43; l += 2) {
        CHECK(expected_fixed_length_classical(hits, l) > expected_fixed_length_classical(hits, l - 1));
    }

    const EpisodeOracle oracle = make_fixed_length_oracle(s, {8, 12, 34});
    const auto points = fixed_length_curve(oracle, Strategy::fixed_hybrid, {8, 12, 34}, 50, 1);
    CHECK(points[0].stats.n_errors == 50);
    CHECK(points[1].stats.n_errors == 0);
    CHECK(points[2].expected_n_act == doctest::Approx(expected_fixed_length_hybrid(
                                           hits.cumulative(34), hits.conditional_mean(34), 34)));
    CHECK_THROWS_AS(fixed_length_curve(oracle, Strategy::hybrid, {12}, 5, 1), std::invalid_argument);
}

TEST_CASE("savings ratio") {
    SummaryStats h;
    h.key = {Strategy::hybrid, 5, 0, std::nullopt};
    h.mean_n_act = 300;
    h.std_error = 3;
    SummaryStats c = h;
    c.key.strategy = Strategy::prob_classical;
    auto r = hybrid_vs_classical_ratio({h, c});
    REQUIRE(r.size() == 1);
    CHECK(r[0].ratio == 0.0);
    c.mean_n_act = 600;
    r = hybrid_vs_classical_ratio({h, c});
    CHECK(r[0].ratio == doctest::Approx(0.5));
    CHECK(r[0].std_error > 0.0);
    CHECK_THROWS_AS(hybrid_vs_classical_ratio({h}), std::invalid_argument);
    CHECK_THROWS_AS(hybrid_vs_classical_ratio({c}), std::invalid_argument);
}
