// hybridgrid command-line driver.
//
//   hybridgrid pinit       --base 5 --dwall 0 [--max-L 16384] [--method hybrid]
//   hybridgrid run         --strategy hybrid --base 5 --dwall 16 --seed 3
//   hybridgrid sweep       [--config sweep.yaml] --out results/
//   hybridgrid fixed-sweep --base 7 --dwall 16 --out fig1/
//   hybridgrid table       --summary results/summary.json
//   hybridgrid hist        --summary results/summary.json --strategy hybrid --base 9 --dwall 16
//   hybridgrid validate    [--cache-dir DIR]
//
// Exit codes: 0 ok, 1 other failure, 2 configuration or usage error,
// 3 runs stopped by a cap, 4 cache error, 5 failed self-check.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <Eigen/Core>

#include "hybridgrid/config.hpp"
#include "hybridgrid/experiment.hpp"
#include "hybridgrid/reporting.hpp"
#include "hybridgrid/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace hybridgrid;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kCap = 3, kCache = 4, kCheck = 5 };

// Raised for bad flag values; maps to kConfig.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int threads = 0;
    std::string cache_dir;
    bool no_build = false;
};

fs::path resolve_cache_dir(const Common& c) {
    if (!c.cache_dir.empty()) return c.cache_dir;
    if (const char* env = std::getenv("HYBRIDGRID_CACHE_DIR"); env && *env) return env;
    return ".hybridgrid-cache";
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ordered_json versions() {
    ordered_json v;
    v["hybridgrid"] = HYBRIDGRID_VERSION;
    v["compiler"] = __VERSION__;
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
    v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    v["cli11"] = CLI11_VERSION;
    return v;
}

std::string join_command(const std::vector<std::string>& args) {
    std::string out = "hybridgrid";
    for (const auto& a : args) out += " " + a;
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = ",") {
    std::ostringstream s;
    for (std::size_t i = 0; i < values.size(); ++i) s << (i ? sep : "") << values[i];
    return s.str();
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
    std::vector<Strategy> out;
    for (const auto& n : names) {
        try {
            out.push_back(parse_strategy(n));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

IterationBound parse_bound(const std::string& s) {
    if (s == "floor") return IterationBound::floor;
    if (s == "ceil") return IterationBound::ceil;
    throw UsageError("--iteration-bound: expected floor or ceil, got '" + s + "'");
}

void print_log(const CurveStore& curves) {
    for (const auto& line : curves.log()) std::cerr << "[curve] " << line << "\n";
}

void report_errors(const std::vector<SummaryStats>& cells) {
    for (const auto& c : cells) {
        if (c.n_errors > 0) {
            std::cerr << "warning: " << describe(c.key) << ": " << c.n_errors << " of " << c.n_runs
                      << " runs failed (" << c.first_error << ")\n";
        }
    }
}

std::string hist_name(const CellKey& k) {
    return "hist_" + std::string(to_string(k.strategy)) + "_b" + std::to_string(k.base_size) + "_d" +
           std::to_string(k.wall_distance) + ".csv";
}

void add_common(CLI::App* sub, Common& c, bool with_cache) {
    sub->add_option("--threads", c.threads, "Worker threads (0: machine parallelism)")
        ->check(CLI::NonNegativeNumber);
    if (with_cache) {
        sub->add_option("--cache-dir", c.cache_dir,
                        "Success-curve cache (default: $HYBRIDGRID_CACHE_DIR or .hybridgrid-cache)");
        sub->add_flag("--no-build", c.no_build, "Fail instead of building a missing curve");
    }
}

// ---------------------------------------------------------------------------

struct PinitArgs {
    int base = 0;
    int dwall = 0;
    std::int64_t max_length = std::int64_t{1} << 22;
    std::string method = "hybrid";
    std::uint64_t seed = 0;
    double convergence = 0.999;
    std::string out;
};

int cmd_pinit(const PinitArgs& a, const Common& c) {
    CurveOptions options;
    try {
        options.policy = parse_curve_policy(a.method);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    options.max_length = a.max_length;
    options.convergence = a.convergence;
    const GridworldSpec spec(a.base, a.dwall);
    const fs::path cache = resolve_cache_dir(c);
    CurveStore curves(options, cache, !c.no_build, a.seed);
    const EpisodeOracle& oracle = curves.oracle(spec);
    print_log(curves);
    for (std::int64_t l : oracle.curve().low_confidence_lengths(options.mc.min_successes)) {
        const auto& p = oracle.curve().points.at(l);
        std::cerr << "warning: L=" << l << " stopped at the shot cap with " << p.n_success
                  << " successes in " << p.n_shots << " shots\n";
    }
    const std::string text = emit_curve(oracle.curve());
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_file(a.out, text);
        std::cerr << "wrote " << a.out << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string strategy = "hybrid";
    int base = 0;
    int dwall = 0;
    std::uint64_t seed = 0;
    std::int64_t length = 0;
    std::string bound = "floor";
    std::int64_t round_cap = Caps{}.round_cap;
    std::int64_t step_cap = Caps{}.step_cap;
};

int cmd_run(const RunArgs& a, const Common& c) {
    const Strategy strategy = parse_strategies({a.strategy}).front();
    const IterationBound bound = parse_bound(a.bound);
    const GridworldSpec spec(a.base, a.dwall);
    const Caps caps{a.round_cap, a.step_cap};
    if (is_fixed_length(strategy) && a.length <= 0) {
        throw UsageError("--length is required for " + std::string(to_string(strategy)));
    }
    RunRecord r;
    switch (strategy) {
        case Strategy::hybrid: {
            CurveStore curves(CurveOptions{}, resolve_cache_dir(c), !c.no_build);
            const EpisodeOracle& oracle = curves.oracle(spec);
            print_log(curves);
            r = run_probabilistic_hybrid(oracle, a.seed, bound);
            break;
        }
        case Strategy::prob_classical: r = run_probabilistic_classical(spec, a.seed); break;
        case Strategy::unrestricted: r = run_unrestricted_classical(spec, a.seed, caps); break;
        case Strategy::fixed_hybrid:
            r = run_fixed_length_hybrid(make_fixed_length_oracle(spec, {a.length}), a.length, a.seed,
                                        caps, bound);
            break;
        case Strategy::fixed_classical:
            r = run_fixed_length_classical(spec, a.length, a.seed, caps);
            break;
    }
    ordered_json j;
    j["strategy"] = std::string(to_string(r.strategy));
    j["b"] = spec.base_size();
    j["d_wall"] = spec.wall_distance();
    j["seed"] = r.seed;
    j["n_act"] = r.n_act;
    j["terminal_L"] = r.terminal_length;
    j["success_step"] = r.success_step;
    j["n_aa_rounds"] = r.n_aa_rounds;
    j["n_doublings"] = r.n_doublings;
    j["n_episodes"] = r.n_episodes;
    j["aa_actions"] = r.aa_actions;
    j["episode_actions"] = r.episode_actions;
    const auto problem = check_invariants(r);
    j["invariants"] = problem ? *problem : "ok";
    std::cout << j.dump(2) << "\n";
    return problem ? kFailure : kOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::vector<std::string> strategies;
    std::vector<int> bases;
    std::vector<int> dwalls;
    std::int64_t n_runs = 0;
    std::uint64_t seed = 0;
    bool record_runs = false;
    std::string bound;
    std::int64_t round_cap = 0;
    std::int64_t step_cap = 0;
    std::int64_t shot_cap = 0;
    std::string out;
};

struct SweepFlags {
    CLI::Option* strategies;
    CLI::Option* bases;
    CLI::Option* dwalls;
    CLI::Option* n_runs;
    CLI::Option* seed;
    CLI::Option* record_runs;
    CLI::Option* bound;
    CLI::Option* round_cap;
    CLI::Option* step_cap;
    CLI::Option* shot_cap;
    CLI::Option* threads;
};

int cmd_sweep(const SweepArgs& a, const SweepFlags& f, const Common& c) {
    ExperimentConfig config = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
    if (f.strategies->count()) config.strategies = parse_strategies(a.strategies);
    if (f.bases->count()) config.base_sizes = a.bases;
    if (f.dwalls->count()) config.wall_distances = a.dwalls;
    if (f.n_runs->count()) config.n_runs = a.n_runs;
    if (f.seed->count()) config.seed_base = a.seed;
    if (f.record_runs->count()) config.record_runs = a.record_runs;
    if (f.bound->count()) config.iteration_bound = parse_bound(a.bound);
    if (f.round_cap->count()) config.caps.round_cap = a.round_cap;
    if (f.step_cap->count()) config.caps.step_cap = a.step_cap;
    if (f.shot_cap->count()) config.curve.mc.shot_cap = a.shot_cap;
    if (f.threads->count()) config.threads = c.threads;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    for (Strategy s : config.strategies) {
        if (is_fixed_length(s)) {
            throw UsageError("strategies: " + std::string(to_string(s)) +
                             " runs through the fixed-sweep subcommand");
        }
    }

    const fs::path out(a.out);
    const fs::path cache = resolve_cache_dir(c);
    CurveStore curves(config.curve, cache, !c.no_build);
    const SweepResult result = run_sweep(config, curves);
    print_log(curves);
    report_errors(result.cells);

    std::vector<std::string> written;
    const auto emit = [&](const std::string& name, const std::string& text) {
        write_file(out / name, text);
        written.push_back(name);
    };
    const std::string config_text = dump_config(config);
    emit("config.yaml", config_text);
    emit("summary.json", emit_summary_json(result.cells));
    emit("table.csv", emit_table(result.cells));
    for (const auto& cell : result.cells) {
        emit("histograms/" + hist_name(cell.key), emit_histogram(result.cells, cell.key));
    }
    const std::set<Strategy> chosen(config.strategies.begin(), config.strategies.end());
    if (chosen.count(Strategy::hybrid) && chosen.count(Strategy::prob_classical)) {
        emit("ratios.csv", emit_ratios(hybrid_vs_classical_ratio(result.cells)));
    }
    if (config.record_runs) emit("runs.csv", emit_runs(result.runs));

    std::int64_t n_errors = 0;
    for (const auto& cell : result.cells) n_errors += cell.n_errors;

    ordered_json m;
    m["tool"] = "hybridgrid";
    m["subcommand"] = "sweep";
    m["rerun"] = join_command({"sweep", "--config", "config.yaml", "--out", ".", "--cache-dir",
                               fs::absolute(cache).lexically_normal().string()});
    m["effective_config"] = config_text;
    m["seeds"] = {{"seed_base", config.seed_base},
                  {"run_seed", "derive_seed(seed_base, cell_code(strategy, b, d_wall), run_index)"},
                  {"curve_seed", 0}};
    auto& curve_list = m["curves"] = ordered_json::array();
    for (int d : config.wall_distances) {
        for (int b : config.base_sizes) {
            if (!chosen.count(Strategy::hybrid)) break;
            const GridworldSpec spec(b, d);
            const SuccessCurve& curve = curves.oracle(spec).curve();
            curve_list.push_back(
                {{"b", b},
                 {"d_wall", d},
                 {"cache_file", cache_path(cache, cache_key(spec, config.curve)).filename().string()},
                 {"max_L", curve.points.empty() ? 0 : curve.points.rbegin()->first},
                 {"converged_at", curve.converged_at ? ordered_json(*curve.converged_at) : ordered_json()}});
        }
    }
    m["versions"] = versions();
    m["n_errors"] = n_errors;
    written.push_back("manifest.json");
    std::sort(written.begin(), written.end());
    m["outputs"] = written;
    write_file(out / "manifest.json", m.dump(2) + "\n");
    std::cerr << "wrote " << written.size() << " files to " << out.string() << "\n";
    return n_errors > 0 ? kCap : kOk;
}

// ---------------------------------------------------------------------------

struct FixedArgs {
    int base = 7;
    int dwall = 16;
    std::vector<std::int64_t> lengths;
    std::int64_t grid_points = 868;
    std::int64_t grid_max = std::int64_t{1} << 14;
    std::int64_t n_runs = 100000;
    std::uint64_t seed = 0;
    std::vector<std::string> strategies{"fixed-hybrid", "fixed-classical"};
    std::string bound = "floor";
    std::int64_t round_cap = Caps{}.round_cap;
    std::int64_t step_cap = Caps{}.step_cap;
    std::string out;
};

int cmd_fixed_sweep(const FixedArgs& a, const Common& c) {
    const GridworldSpec spec(a.base, a.dwall);
    const std::vector<Strategy> strategies = parse_strategies(a.strategies);
    for (Strategy s : strategies) {
        if (!is_fixed_length(s)) {
            throw UsageError("--strategies: fixed-sweep takes fixed-hybrid and/or fixed-classical");
        }
    }
    if (a.n_runs < 1) throw UsageError("--n-runs: must be positive");
    std::vector<std::int64_t> lengths = a.lengths;
    if (lengths.empty()) {
        lengths = default_fixed_grid(spec, a.grid_points, a.grid_max);
    } else {
        std::sort(lengths.begin(), lengths.end());
        lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
        if (lengths.front() < 1) throw UsageError("--lengths: episode lengths must be positive");
    }
    const IterationBound bound = parse_bound(a.bound);
    const Caps caps{a.round_cap, a.step_cap};
    const EpisodeOracle oracle = make_fixed_length_oracle(spec, lengths);

    const fs::path out(a.out);
    std::vector<std::string> written;
    std::int64_t n_errors = 0;
    for (Strategy s : strategies) {
        const auto points = fixed_length_curve(oracle, s, lengths, a.n_runs, a.seed, caps, c.threads, bound);
        std::vector<SummaryStats> cells;
        for (const auto& p : points) {
            n_errors += p.stats.n_errors;
            cells.push_back(p.stats);
        }
        report_errors(cells);
        const std::string name = std::string(to_string(s)) + "_b" + std::to_string(a.base) + "_d" +
                                 std::to_string(a.dwall) + ".csv";
        write_file(out / name, emit_fixed_curve(spec, s, points));
        written.push_back(name);
    }

    std::vector<std::string> rerun{"fixed-sweep", "--base", std::to_string(a.base), "--dwall",
                                   std::to_string(a.dwall), "--n-runs", std::to_string(a.n_runs),
                                   "--seed", std::to_string(a.seed), "--strategies",
                                   join(a.strategies), "--iteration-bound", a.bound,
                                   "--round-cap", std::to_string(a.round_cap), "--step-cap",
                                   std::to_string(a.step_cap)};
    if (a.lengths.empty()) {
        rerun.insert(rerun.end(), {"--grid-points", std::to_string(a.grid_points), "--grid-max",
                                   std::to_string(a.grid_max)});
    } else {
        rerun.insert(rerun.end(), {"--lengths", join(lengths)});
    }
    rerun.insert(rerun.end(), {"--out", "."});

    ordered_json m;
    m["tool"] = "hybridgrid";
    m["subcommand"] = "fixed-sweep";
    m["rerun"] = join_command(rerun);
    m["seeds"] = {{"seed_base", a.seed},
                  {"run_seed", "derive_seed(seed_base, cell_code(strategy, L), run_index)"}};
    m["lengths"] = lengths;
    m["versions"] = versions();
    m["n_errors"] = n_errors;
    written.push_back("manifest.json");
    std::sort(written.begin(), written.end());
    m["outputs"] = written;
    write_file(out / "manifest.json", m.dump(2) + "\n");
    std::cerr << "wrote " << written.size() << " files to " << out.string() << "\n";
    return n_errors > 0 ? kCap : kOk;
}

// ---------------------------------------------------------------------------

std::vector<SummaryStats> load_summary(const std::string& path) {
    try {
        return parse_summary_json(read_file(path));
    } catch (const std::invalid_argument& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void print_or_write(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

int cmd_validate(const Common& c) {
    const auto results = run_self_checks(resolve_cache_dir(c), effective_threads(c.threads));
    bool cache_failed = false;
    bool other_failed = false;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        if (!r.passed) (r.name == "cache" ? cache_failed : other_failed) = true;
    }
    if (other_failed) return kCheck;
    return cache_failed ? kCache : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid agent first-reward search in parameterized gridworlds"};
    app.set_version_flag("--version", HYBRIDGRID_VERSION);
    app.require_subcommand(1);
    Common common;

    PinitArgs pa;
    auto* pinit = app.add_subcommand("pinit", "Build or load a success-probability curve");
    pinit->add_option("--base,-b", pa.base, "Base size")->required()->check(CLI::Range(2, 8191));
    pinit->add_option("--dwall,-d", pa.dwall, "Outer wall distance")->required()->check(CLI::Range(0, 65535));
    pinit->add_option("--max-L", pa.max_length, "Largest episode length")->check(CLI::PositiveNumber);
    pinit->add_option("--method", pa.method, "mc, exact or hybrid");
    pinit->add_option("--seed", pa.seed, "Seed for Monte-Carlo points");
    pinit->add_option("--convergence", pa.convergence, "Stop once p_init reaches this value");
    pinit->add_option("--out,-o", pa.out, "Curve file (default: standard output)");
    add_common(pinit, common, true);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "Play one agent run and print its record");
    run->add_option("--strategy,-s", ra.strategy, "Strategy name");
    run->add_option("--base,-b", ra.base, "Base size")->required()->check(CLI::Range(2, 8191));
    run->add_option("--dwall,-d", ra.dwall, "Outer wall distance")->required()->check(CLI::Range(0, 65535));
    run->add_option("--seed", ra.seed, "Run seed");
    run->add_option("--length,-L", ra.length, "Episode length for fixed-length strategies");
    run->add_option("--iteration-bound", ra.bound, "floor or ceil");
    run->add_option("--round-cap", ra.round_cap)->check(CLI::PositiveNumber);
    run->add_option("--step-cap", ra.step_cap)->check(CLI::PositiveNumber);
    add_common(run, common, true);

    SweepArgs sa;
    SweepFlags sf{};
    auto* sweep = app.add_subcommand("sweep", "Run a grid of cells and write table, histograms, summary");
    sweep->add_option("--config,-c", sa.config, "YAML configuration")->check(CLI::ExistingFile);
    sf.strategies = sweep->add_option("--strategies", sa.strategies, "Comma-separated strategy names")
                        ->delimiter(',');
    sf.bases = sweep->add_option("--base,-b", sa.bases, "Base sizes")->delimiter(',');
    sf.dwalls = sweep->add_option("--dwall,-d", sa.dwalls, "Outer wall distances")->delimiter(',');
    sf.n_runs = sweep->add_option("--n-runs,-n", sa.n_runs, "Runs per cell");
    sf.seed = sweep->add_option("--seed", sa.seed, "seed_base");
    sf.record_runs = sweep->add_flag("--record-runs", sa.record_runs, "Also write runs.csv");
    sf.bound = sweep->add_option("--iteration-bound", sa.bound, "floor or ceil");
    sf.round_cap = sweep->add_option("--round-cap", sa.round_cap);
    sf.step_cap = sweep->add_option("--step-cap", sa.step_cap);
    sf.shot_cap = sweep->add_option("--shot-cap", sa.shot_cap);
    sweep->add_option("--out,-o", sa.out, "Output directory")->required();
    add_common(sweep, common, true);
    sf.threads = sweep->get_option("--threads");

    FixedArgs fa;
    auto* fixed = app.add_subcommand("fixed-sweep", "Mean actions against a constant episode length");
    fixed->add_option("--base,-b", fa.base, "Base size")->check(CLI::Range(2, 8191));
    fixed->add_option("--dwall,-d", fa.dwall, "Outer wall distance")->check(CLI::Range(0, 65535));
    fixed->add_option("--lengths", fa.lengths, "Explicit episode lengths")->delimiter(',');
    fixed->add_option("--grid-points", fa.grid_points, "Size of the log-spaced default grid")
        ->check(CLI::PositiveNumber);
    fixed->add_option("--grid-max", fa.grid_max, "Largest length of the default grid")
        ->check(CLI::PositiveNumber);
    fixed->add_option("--n-runs,-n", fa.n_runs, "Runs per length");
    fixed->add_option("--seed", fa.seed, "seed_base");
    fixed->add_option("--strategies", fa.strategies, "fixed-hybrid and/or fixed-classical")->delimiter(',');
    fixed->add_option("--iteration-bound", fa.bound, "floor or ceil");
    fixed->add_option("--round-cap", fa.round_cap)->check(CLI::PositiveNumber);
    fixed->add_option("--step-cap", fa.step_cap)->check(CLI::PositiveNumber);
    fixed->add_option("--out,-o", fa.out, "Output directory")->required();
    add_common(fixed, common, false);

    std::string summary;
    std::string table_out;
    auto* table = app.add_subcommand("table", "Re-emit the results table from a summary.json");
    table->add_option("--summary", summary, "summary.json written by sweep")->required();
    table->add_option("--out,-o", table_out, "Output file (default: standard output)");

    std::string hist_strategy = "hybrid";
    int hist_base = 0;
    int hist_dwall = 0;
    std::int64_t hist_length = 0;
    auto* hist = app.add_subcommand("hist", "Terminal episode length histogram of one cell");
    hist->add_option("--summary", summary, "summary.json written by sweep")->required();
    hist->add_option("--strategy,-s", hist_strategy, "Strategy name");
    hist->add_option("--base,-b", hist_base, "Base size")->required();
    hist->add_option("--dwall,-d", hist_dwall, "Outer wall distance")->required();
    hist->add_option("--length,-L", hist_length, "Episode length of a fixed-length cell");
    hist->add_option("--out,-o", table_out, "Output file (default: standard output)");

    auto* validate = app.add_subcommand("validate", "Fast oracle and invariant self-checks");
    add_common(validate, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*pinit) return cmd_pinit(pa, common);
        if (*run) return cmd_run(ra, common);
        if (*sweep) return cmd_sweep(sa, sf, common);
        if (*fixed) return cmd_fixed_sweep(fa, common);
        if (*table) {
            print_or_write(table_out, emit_table(load_summary(summary)));
            return kOk;
        }
        if (*hist) {
            CellKey key{parse_strategies({hist_strategy}).front(), hist_base, hist_dwall, std::nullopt};
            if (hist_length > 0) key.length = hist_length;
            const auto cells = load_summary(summary);
            try {
                print_or_write(table_out, emit_histogram(cells, key));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            return kOk;
        }
        if (*validate) return cmd_validate(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kCap;
    } catch (const CacheError& e) {
        std::cerr << "cache error: " << e.what() << "\n";
        return kCache;
    } catch (const MissingCurvePoint& e) {
        std::cerr << "cache error: " << e.what() << "\n";
        return kCache;
    } catch (const IncompleteGrid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
