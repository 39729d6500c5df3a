#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hybridgrid/config.hpp"
#include "hybridgrid/experiment.hpp"
#include "hybridgrid/reporting.hpp"
#include "hybridgrid/validation.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace hybridgrid;

namespace {

Strategy strategy_arg(const std::string& name) { return parse_strategy(name); }

IterationBound bound_arg(const std::string& name) {
    if (name == "floor") return IterationBound::floor;
    if (name == "ceil") return IterationBound::ceil;
    throw std::invalid_argument("iteration bound must be 'floor' or 'ceil', got '" + name + "'");
}

py::dict record_dict(const RunRecord& r) {
    return py::dict("strategy"_a = std::string(to_string(r.strategy)), "b"_a = r.spec.base_size(),
                    "d_wall"_a = r.spec.wall_distance(), "n_act"_a = r.n_act,
                    "terminal_length"_a = r.terminal_length, "success_step"_a = r.success_step,
                    "n_aa_rounds"_a = r.n_aa_rounds, "n_doublings"_a = r.n_doublings,
                    "n_episodes"_a = r.n_episodes, "aa_actions"_a = r.aa_actions,
                    "episode_actions"_a = r.episode_actions, "seed"_a = r.seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid amplitude-amplification agent on a walled gridworld";
    m.attr("__version__") = HYBRIDGRID_VERSION;

    py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);
    py::register_exception<CacheError>(m, "CacheError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<MissingCurvePoint>(m, "MissingCurvePoint", PyExc_KeyError);

    py::class_<GridworldSpec>(m, "GridworldSpec")
        .def(py::init<int, int>(), "base_size"_a, "wall_distance"_a)
        .def_property_readonly("base_size", &GridworldSpec::base_size)
        .def_property_readonly("wall_distance", &GridworldSpec::wall_distance)
        .def_property_readonly("side", &GridworldSpec::side)
        .def_property_readonly("min_length", &GridworldSpec::min_length)
        .def_property_readonly("start", [](const GridworldSpec& s) { return py::make_tuple(s.start().x, s.start().y); })
        .def_property_readonly("target", [](const GridworldSpec& s) { return py::make_tuple(s.target().x, s.target().y); })
        .def("__eq__", [](const GridworldSpec& a, const GridworldSpec& b) { return a == b; })
        .def("__repr__", [](const GridworldSpec& s) {
            return "GridworldSpec(base_size=" + std::to_string(s.base_size()) +
                   ", wall_distance=" + std::to_string(s.wall_distance()) + ")";
        });

    m.def("pinit_min_closed_form", &pinit_min_closed_form, "spec"_a);
    m.def("exact_dp", &exact_dp, "spec"_a, "length"_a, py::call_guard<py::gil_scoped_release>());
    m.def(
        "first_hit_masses",
        [](const GridworldSpec& spec, std::int64_t horizon) {
            FirstHitDistribution hits = [&] {
                py::gil_scoped_release release;
                return first_hit_distribution(spec, horizon);
            }();
            py::array_t<double> out(horizon);
            auto view = out.mutable_unchecked<1>();
            for (std::int64_t t = 1; t <= horizon; ++t) view(t - 1) = hits.mass(t);
            return out;
        },
        "spec"_a, "horizon"_a, "Probability of first entering the target at steps 1..horizon.");
    m.def("expected_first_passage", &expected_first_passage, "spec"_a, "tolerance"_a = 1e-10,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "estimate_mc",
        [](const GridworldSpec& spec, std::int64_t length, std::uint64_t seed, std::int64_t shot_cap) {
            py::gil_scoped_release release;
            Rng rng = make_rng(seed);
            McOptions opts;
            opts.shot_cap = shot_cap;
            const CurvePoint p = estimate_mc(spec, length, rng, opts);
            return std::make_tuple(p.estimate, p.n_shots, p.n_success);
        },
        "spec"_a, "length"_a, "seed"_a = 0, "shot_cap"_a = std::int64_t{1} << 24,
        "Returns (estimate, n_shots, n_success).");

    m.def("amplified_probability", py::vectorize(&amplified_probability), "p"_a, "k"_a);
    m.def("jump_probability", &jump_probability, "m"_a, "length"_a);

    py::class_<CurveStore>(m, "CurveStore")
        .def(py::init([](std::optional<std::filesystem::path> cache_dir, bool allow_build) {
                 return std::make_unique<CurveStore>(CurveOptions{}, std::move(cache_dir), allow_build);
             }),
             "cache_dir"_a = py::none(), "allow_build"_a = true)
        .def(
            "pinit",
            [](CurveStore& store, const GridworldSpec& spec, std::int64_t length) {
                py::gil_scoped_release release;
                return store.oracle(spec).pinit(length);
            },
            "spec"_a, "length"_a)
        .def(
            "curve",
            [](CurveStore& store, const GridworldSpec& spec) {
                const SuccessCurve* c = nullptr;
                {
                    py::gil_scoped_release release;
                    c = &store.oracle(spec).curve();
                }
                py::dict out;
                for (const auto& [l, p] : c->points) out[py::int_(l)] = p.estimate;
                return out;
            },
            "spec"_a, "p_init by episode length for the doubling ladder.")
        .def("log", &CurveStore::log);

    m.def(
        "run",
        [](const std::string& strategy, const GridworldSpec& spec, std::uint64_t seed, CurveStore* curves,
           std::optional<std::int64_t> length, const std::string& bound) {
            const Strategy s = strategy_arg(strategy);
            const IterationBound ib = bound_arg(bound);
            if (is_fixed_length(s) && !length) throw std::invalid_argument("fixed-length strategies need length");
            RunRecord r;
            {
                py::gil_scoped_release release;
                switch (s) {
                case Strategy::hybrid:
                    if (!curves) throw std::invalid_argument("hybrid runs need a CurveStore");
                    r = run_probabilistic_hybrid(curves->oracle(spec), seed, ib);
                    break;
                case Strategy::prob_classical:
                    r = run_probabilistic_classical(spec, seed);
                    break;
                case Strategy::unrestricted:
                    r = run_unrestricted_classical(spec, seed);
                    break;
                case Strategy::fixed_hybrid:
                    r = run_fixed_length_hybrid(make_fixed_length_oracle(spec, {*length}), *length, seed, {}, ib);
                    break;
                case Strategy::fixed_classical:
                    r = run_fixed_length_classical(spec, *length, seed);
                    break;
                }
            }
            return record_dict(r);
        },
        "strategy"_a, "spec"_a, "seed"_a = 0, "curves"_a = py::none(), "length"_a = py::none(),
        "iteration_bound"_a = "floor", "One run until the first reward, as a dict of counters.");

    py::class_<SummaryStats>(m, "SummaryStats")
        .def_property_readonly("strategy", [](const SummaryStats& s) { return std::string(to_string(s.key.strategy)); })
        .def_property_readonly("base_size", [](const SummaryStats& s) { return s.key.base_size; })
        .def_property_readonly("wall_distance", [](const SummaryStats& s) { return s.key.wall_distance; })
        .def_readonly("mean_n_act", &SummaryStats::mean_n_act)
        .def_readonly("std_error", &SummaryStats::std_error)
        .def_readonly("mean_terminal_length", &SummaryStats::mean_terminal_length)
        .def_readonly("terminal_histogram", &SummaryStats::terminal_histogram)
        .def_readonly("n_runs", &SummaryStats::n_runs)
        .def_readonly("n_completed", &SummaryStats::n_completed)
        .def_readonly("n_errors", &SummaryStats::n_errors)
        .def("__repr__", [](const SummaryStats& s) {
            return "SummaryStats(" + describe(s.key) + ", mean_n_act=" + format_full(s.mean_n_act) + ")";
        });

    m.def(
        "sweep",
        [](const std::string& config_yaml, std::optional<std::filesystem::path> cache_dir, int threads) {
            ExperimentConfig c = parse_config(config_yaml);
            c.threads = threads;
            py::gil_scoped_release release;
            CurveStore curves(c.curve, std::move(cache_dir));
            return run_sweep(c, curves).cells;
        },
        "config_yaml"_a, "cache_dir"_a = py::none(), "threads"_a = 0,
        "Runs every probabilistic cell of a YAML configuration.");
    m.def("table_csv", &emit_table, "cells"_a);
    m.def("summary_json", &emit_summary_json, "cells"_a);
    m.def("default_config_yaml", [] { return dump_config(ExperimentConfig{}); });

    m.def("expected_fixed_length_classical", [](const GridworldSpec& spec, std::int64_t length) {
        return expected_fixed_length_classical(first_hit_distribution(spec, length), length);
    }, "spec"_a, "length"_a, py::call_guard<py::gil_scoped_release>());
    m.def("expected_fixed_length_hybrid", [](const GridworldSpec& spec, std::int64_t length, const std::string& bound) {
        const IterationBound ib = bound_arg(bound);
        py::gil_scoped_release release;
        const FirstHitDistribution hits = first_hit_distribution(spec, length);
        return expected_fixed_length_hybrid(hits.cumulative(length), hits.conditional_mean(length), length, ib);
    }, "spec"_a, "length"_a, "iteration_bound"_a = "floor");

    m.def(
        "self_check",
        [](std::optional<std::filesystem::path> cache_dir) {
            std::vector<CheckResult> results;
            {
                py::gil_scoped_release release;
                results = run_self_checks(cache_dir);
            }
            py::list out;
            for (const auto& r : results) out.append(py::make_tuple(r.name, r.passed, r.detail));
            return out;
        },
        "cache_dir"_a = py::none(), "List of (name, passed, detail).");
}
