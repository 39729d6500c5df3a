#include "hybridgrid/validation.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

#include "hybridgrid/experiment.hpp"
#include "hybridgrid/reporting.hpp"

namespace hybridgrid {

namespace {

CheckResult dp_vs_closed_form() {
    double worst = 0.0;
    for (int b = 2; b <= 9; ++b) {
        for (int d : {0, 4}) {
            const GridworldSpec spec(b, d);
            worst = std::max(worst, std::abs(exact_dp(spec, spec.min_length()) -
                                             pinit_min_closed_form(spec)));
        }
    }
    std::ostringstream s;
    s << "max |dp - closed form| = " << worst;
    return {"dp-closed-form", worst <= 1e-12, s.str()};
}

CheckResult dp_parity() {
    for (int b : {5, 7}) {
        for (int d : {0, 4, 8}) {
            const GridworldSpec spec(b, d);
            OccupationPropagator prop(spec);
            const std::int64_t last_odd = spec.min_length() + 2 * d - 1;
            for (std::int64_t t = 1; t <= last_odd; ++t) {
                const double mass = prop.advance();
                if (t % 2 == 1 && mass != 0.0) {
                    return {"dp-parity", false,
                            "odd hit mass at t=" + std::to_string(t) + " for b=" + std::to_string(b) +
                                " d_wall=" + std::to_string(d)};
                }
            }
        }
    }
    return {"dp-parity", true, "no odd-step hits below L_min + 2 d_wall"};
}

CheckResult aa_rotation() {
    double worst = 0.0;
    for (double p : {1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0}) {
        // Basis (bad, good); start state s; Grover iterate = (2|s><s| - I) * oracle flip.
        const double s0 = std::sqrt(1.0 - p);
        const double s1 = std::sqrt(p);
        double bad = s0;
        double good = s1;
        for (int k = 0; k <= 40; ++k) {
            worst = std::max(worst, std::abs(amplified_probability(p, k) - good * good));
            good = -good;
            const double overlap = s0 * bad + s1 * good;
            bad = 2.0 * overlap * s0 - bad;
            good = 2.0 * overlap * s1 - good;
        }
    }
    std::ostringstream s;
    s << "max deviation from explicit rotation = " << worst;
    return {"aa-rotation", worst <= 1e-12, s.str()};
}

CheckResult first_passage() {
    const double e = expected_first_passage(GridworldSpec(2, 0));
    std::ostringstream s;
    s.precision(17);
    s << "E[T](b=2, d_wall=0) = " << e;
    return {"first-passage", std::abs(e - 8.0) <= 1e-9, s.str()};
}

CheckResult mc_vs_dp() {
    const GridworldSpec spec(4, 1);
    Rng rng = make_rng(12345);
    McOptions options;
    options.min_successes = 1;
    options.batch_size = 1 << 16;
    options.shot_cap = 1 << 16;
    const std::int64_t length = 12;
    const CurvePoint point = estimate_mc(spec, length, rng, options);
    const double exact = exact_dp(spec, length);
    const double sd = std::sqrt(exact * (1.0 - exact) / static_cast<double>(point.n_shots));
    std::ostringstream s;
    s << "mc " << point.estimate << " vs dp " << exact << " (" << (point.estimate - exact) / sd
      << " sd)";
    return {"mc-vs-dp", std::abs(point.estimate - exact) <= 4.0 * sd, s.str()};
}

CheckResult run_invariants() {
    const GridworldSpec spec(3, 2);
    Rng rng = make_rng(1);
    const EpisodeOracle oracle = make_oracle(build_curve(spec, rng));
    std::int64_t checked = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const RunRecord runs[] = {
            run_probabilistic_hybrid(oracle, seed),
            run_probabilistic_classical(spec, seed),
            run_unrestricted_classical(spec, seed),
            run_fixed_length_hybrid(oracle, 8, seed),
            run_fixed_length_classical(spec, 7, seed),
        };
        for (const auto& r : runs) {
            if (auto problem = check_invariants(r)) {
                return {"run-invariants", false,
                        std::string(to_string(r.strategy)) + " seed " + std::to_string(seed) + ": " +
                            *problem};
            }
            ++checked;
        }
    }
    return {"run-invariants", true, std::to_string(checked) + " records consistent"};
}

CheckResult determinism(int threads) {
    ExperimentConfig config;
    config.base_sizes = {3, 4};
    config.wall_distances = {0, 2};
    config.n_runs = 200;
    config.seed_base = 7;
    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
        config.threads = i == 0 ? 1 : std::max(threads, 2);
        CurveStore curves(config.curve, std::nullopt);
        const SweepResult result = run_sweep(config, curves);
        outputs[i] = emit_table(result.cells) + emit_summary_json(result.cells);
    }
    return {"determinism", outputs[0] == outputs[1],
            outputs[0] == outputs[1] ? "two micro-sweeps byte-identical"
                                     : "micro-sweep outputs differ between executions"};
}

std::vector<CheckResult> cache_checks(const std::filesystem::path& dir) {
    std::vector<CheckResult> out;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        out.push_back({"cache", true, "no cache directory at " + dir.string()});
        return out;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::int64_t good = 0;
    for (const auto& f : files) {
        try {
            cache_load_any(f);
            ++good;
        } catch (const CacheError& e) {
            out.push_back({"cache", false, f.filename().string() + ": " + e.what()});
        }
    }
    if (out.empty()) {
        out.push_back({"cache", true, std::to_string(good) + " curve file(s) valid in " + dir.string()});
    }
    return out;
}

}  // namespace

std::vector<CheckResult> run_self_checks(const std::optional<std::filesystem::path>& cache_dir,
                                         int threads) {
    std::vector<CheckResult> out;
    const auto guarded = [&](const char* name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };
    guarded("dp-closed-form", dp_vs_closed_form);
    guarded("dp-parity", dp_parity);
    guarded("aa-rotation", aa_rotation);
    guarded("first-passage", first_passage);
    guarded("mc-vs-dp", mc_vs_dp);
    guarded("run-invariants", run_invariants);
    guarded("determinism", [&] { return determinism(threads); });
    if (cache_dir) {
        for (auto& c : cache_checks(*cache_dir)) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace hybridgrid
