#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hybridgrid/config.hpp"

using namespace hybridgrid;

TEST_CASE("empty document keeps the defaults") {
    const ExperimentConfig c = parse_config("");
    const ExperimentConfig d;
    CHECK(c.n_runs == d.n_runs);
    CHECK(c.base_sizes == d.base_sizes);
    CHECK(c.wall_distances == d.wall_distances);
    CHECK(c.strategies == d.strategies);
}

TEST_CASE("full document") {
    const ExperimentConfig c = parse_config(R"(
strategies: [hybrid, prob-classical]
base_sizes: [9]
wall_distances: [16]
n_runs: 500
seed_base: 12
threads: 3
record_runs: true
iteration_bound: ceil
curve:
  policy: exact
  convergence: 0.99
  max_length: 65536
  dp_budget: 1e9
  batch_size: 1024
  min_successes: 8
caps:
  shot_cap: 4096
  round_cap: 1000
  step_cap: 50000
fixed_length:
  grid: [12, 34, 100]
  points: 10
  max_length: 2048
)");
    CHECK(c.strategies == std::vector<Strategy>{Strategy::hybrid, Strategy::prob_classical});
    CHECK(c.base_sizes == std::vector<int>{9});
    CHECK(c.n_runs == 500);
    CHECK(c.seed_base == 12);
    CHECK(c.threads == 3);
    CHECK(c.record_runs);
    CHECK(c.iteration_bound == IterationBound::ceil);
    CHECK(c.curve.policy == CurvePolicy::exact);
    CHECK(c.curve.convergence == 0.99);
    CHECK(c.curve.max_length == 65536);
    CHECK(c.curve.dp_budget == 1e9);
    CHECK(c.curve.mc.batch_size == 1024);
    CHECK(c.curve.mc.min_successes == 8);
    CHECK(c.curve.mc.shot_cap == 4096);
    CHECK(c.caps.round_cap == 1000);
    CHECK(c.caps.step_cap == 50000);
    CHECK(c.fixed_lengths == std::vector<std::int64_t>{12, 34, 100});
    CHECK(c.fixed_grid_points == 10);
    CHECK(c.fixed_grid_max == 2048);

    const ExperimentConfig again = parse_config(dump_config(c));
    CHECK(dump_config(again) == dump_config(c));
}

TEST_CASE("diagnostics carry line and field") {
    const auto error_of = [](const std::string& text) -> ConfigError {
        try {
            parse_config(text, "sweep.yaml");
        } catch (const ConfigError& e) {
            return e;
        }
        FAIL("no ConfigError for: " << text);
        return ConfigError("", 0, "", "");
    };
    ConfigError e = error_of("n_runs: 10\nbase_sizes: [5, seven]\n");
    CHECK(e.line() == 2);
    CHECK(e.field() == "base_sizes");
    CHECK(std::string(e.what()).find("sweep.yaml:2") == 0);

    e = error_of("n_runs: 10\ncurve:\n  policy: mc\n  bogus: 1\n");
    CHECK(e.line() == 4);
    CHECK(e.field() == "curve.bogus");

    e = error_of("seed: 3\n");
    CHECK(e.field() == "seed");

    e = error_of("strategies: [hybrid, greedy]\n");
    CHECK(e.field() == "strategies");
    CHECK(e.line() == 1);

    e = error_of("n_runs: 10\n\nwall_distances: [0, -2]\n");
    CHECK(e.line() == 3);
    CHECK(e.field() == "wall_distances");

    e = error_of("curve:\n  policy: sometimes\n");
    CHECK(e.field() == "curve.policy");
    CHECK(e.line() == 2);

    e = error_of("n_runs: [1, 2\n");
    CHECK(e.field() == "<syntax>");

    e = error_of("iteration_bound: round\n");
    CHECK(e.field() == "iteration_bound");

    e = error_of("- 1\n- 2\n");
    CHECK(e.field() == "<root>");
}

TEST_CASE("load_config") {
    const auto path = std::filesystem::temp_directory_path() / "hybridgrid-config-test.yaml";
    std::ofstream(path) << "n_runs: 77\n";
    CHECK(load_config(path).n_runs == 77);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), ConfigError);
}
