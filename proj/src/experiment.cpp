#include "hybridgrid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace hybridgrid {

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& what) {
        throw std::invalid_argument(field + ": " + what);
    };
    if (strategies.empty()) fail("strategies", "must not be empty");
    if (base_sizes.empty()) fail("base_sizes", "must not be empty");
    if (wall_distances.empty()) fail("wall_distances", "must not be empty");
    if (n_runs < 1) fail("n_runs", "must be >= 1");
    if (n_runs > 0xffffffffLL) fail("n_runs", "must be below 2^32");
    for (int b : base_sizes) {
        if (b < 2 || b >= (1 << 13)) fail("base_sizes", "values must lie in [2, 8191]");
    }
    for (int d : wall_distances) {
        if (d < 0 || d >= (1 << 16)) fail("wall_distances", "values must lie in [0, 65535]");
    }
    for (std::int64_t l : fixed_lengths) {
        if (l < 1 || l >= (std::int64_t{1} << 29)) fail("fixed_length.grid", "values must lie in [1, 2^29)");
    }
    if (fixed_grid_points < 1) fail("fixed_length.points", "must be >= 1");
    if (fixed_grid_max < 1) fail("fixed_length.max_length", "must be >= 1");
    if (caps.round_cap < 1) fail("caps.round_cap", "must be >= 1");
    if (caps.step_cap < 1) fail("caps.step_cap", "must be >= 1");
    if (curve.mc.batch_size < 1) fail("curve.batch_size", "must be >= 1");
    if (curve.mc.shot_cap < curve.mc.batch_size || curve.mc.shot_cap % curve.mc.batch_size != 0) {
        fail("caps.shot_cap", "must be a positive multiple of curve.batch_size");
    }
    if (!(curve.convergence > 0.0)) fail("curve.convergence", "must be positive");
    if (curve.max_length < 1) fail("curve.max_length", "must be >= 1");
    if (threads < 0) fail("threads", "must be >= 0");
}

std::string describe(const CellKey& key) {
    std::ostringstream s;
    s << to_string(key.strategy) << " b=" << key.base_size << " d_wall=" << key.wall_distance;
    if (key.length) s << " L=" << *key.length;
    return s.str();
}

std::uint32_t cell_code(const CellKey& key) {
    const auto strategy = static_cast<std::uint32_t>(key.strategy);
    if (key.length) {
        return (strategy << 29) | static_cast<std::uint32_t>(*key.length & 0x1fffffff);
    }
    return (strategy << 29) | (static_cast<std::uint32_t>(key.base_size & 0x1fff) << 16) |
           static_cast<std::uint32_t>(key.wall_distance & 0xffff);
}

std::uint64_t run_seed(std::uint64_t seed_base, const CellKey& key, std::int64_t run_index) {
    return derive_seed(seed_base, cell_code(key), static_cast<std::uint64_t>(run_index));
}

std::int64_t histogram_bin(Strategy strategy, std::int64_t terminal_length) {
    if (strategy != Strategy::unrestricted || terminal_length < 1) {
        return terminal_length;
    }
    std::int64_t bin = 1;
    while (bin <= terminal_length / 2) bin *= 2;
    return bin;
}

SummaryStats summarize(const CellKey& key, const std::vector<RunResult>& runs) {
    SummaryStats s;
    s.key = key;
    s.n_runs = static_cast<std::int64_t>(runs.size());
    double mean = 0.0;
    double m2 = 0.0;
    double length_sum = 0.0;
    double step_sum = 0.0;
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& run : runs) {
        if (!run.record) {
            if (s.n_errors++ == 0) s.first_error = run.error;
            continue;
        }
        const RunRecord& r = *run.record;
        ++s.n_completed;
        const double x = static_cast<double>(r.n_act);
        const double delta = x - mean;
        mean += delta / static_cast<double>(s.n_completed);
        m2 += delta * (x - mean);
        length_sum += static_cast<double>(r.terminal_length);
        step_sum += static_cast<double>(r.success_step);
        ++counts[histogram_bin(key.strategy, r.terminal_length)];
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (s.n_completed == 0) {
        s.mean_n_act = s.std_error = s.mean_terminal_length = s.mean_success_step = nan;
        return s;
    }
    const auto n = static_cast<double>(s.n_completed);
    s.mean_n_act = mean;
    s.std_error = s.n_completed > 1 ? std::sqrt(m2 / (n - 1.0) / n) : nan;
    s.mean_terminal_length = length_sum / n;
    s.mean_success_step = step_sum / n;
    for (const auto& [bin, c] : counts) {
        s.terminal_histogram[bin] = static_cast<double>(c) / n;
    }
    return s;
}

// ---------------------------------------------------------------------------

int effective_threads(int requested) {
    if (requested > 0) return requested;
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(effective_threads(threads), n));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = std::max<std::int64_t>(1, n / (static_cast<std::int64_t>(workers) * 16));
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::int64_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::int64_t end = std::min(n, begin + chunk);
            try {
                for (std::int64_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

CurveStore::CurveStore(CurveOptions options, std::optional<std::filesystem::path> cache_dir,
                       bool allow_build, std::uint64_t curve_seed)
    : options_(std::move(options)),
      cache_dir_(std::move(cache_dir)),
      allow_build_(allow_build),
      curve_seed_(curve_seed) {}

std::vector<std::string> CurveStore::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::shared_ptr<const EpisodeOracle> CurveStore::load_or_build(const GridworldSpec& spec) {
    const CacheKey key = cache_key(spec, options_);
    const std::string label = "b=" + std::to_string(spec.base_size()) +
                              " d_wall=" + std::to_string(spec.wall_distance());
    std::optional<SuccessCurve> curve;
    std::string note;
    if (cache_dir_) {
        const auto path = cache_path(*cache_dir_, key);
        try {
            curve = cache_load(path, key);
            note = "cache hit " + label + " (" + path.filename().string() + ")";
        } catch (const CacheNotFound&) {
            if (!allow_build_) {
                throw CacheNotFound("no cached success curve for " + label + " at " + path.string() +
                                    " and building is disabled");
            }
        }
        if (!curve) {
            Rng rng = make_rng(derive_seed(curve_seed_, cell_code({Strategy::hybrid, spec.base_size(),
                                                                   spec.wall_distance(), {}}), 0));
            curve = build_curve(spec, rng, options_);
            cache_store(path, *curve, key);
            note = "built " + label + ", stored " + path.filename().string();
        }
    } else {
        if (!allow_build_) {
            throw CacheNotFound("no cache directory configured for " + label +
                                " and building is disabled");
        }
        Rng rng = make_rng(derive_seed(curve_seed_, cell_code({Strategy::hybrid, spec.base_size(),
                                                               spec.wall_distance(), {}}), 0));
        curve = build_curve(spec, rng, options_);
        note = "built " + label + " (no cache)";
    }
    auto oracle = std::make_shared<const EpisodeOracle>(make_oracle(std::move(*curve)));
    std::lock_guard lock(mutex_);
    log_.push_back(note);
    return oracle;
}

void CurveStore::prepare(const std::vector<GridworldSpec>& specs, int threads) {
    std::vector<GridworldSpec> missing;
    {
        std::lock_guard lock(mutex_);
        std::set<std::pair<int, int>> seen;
        for (const auto& s : specs) {
            const std::pair key{s.base_size(), s.wall_distance()};
            if (!oracles_.count(key) && seen.insert(key).second) missing.push_back(s);
        }
    }
    std::vector<std::shared_ptr<const EpisodeOracle>> built(missing.size());
    parallel_for(static_cast<std::int64_t>(missing.size()), threads, [&](std::int64_t i) {
        built[static_cast<std::size_t>(i)] = load_or_build(missing[static_cast<std::size_t>(i)]);
    });
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < missing.size(); ++i) {
        oracles_[{missing[i].base_size(), missing[i].wall_distance()}] = built[i];
    }
}

const EpisodeOracle& CurveStore::oracle(const GridworldSpec& spec) {
    const std::pair key{spec.base_size(), spec.wall_distance()};
    {
        std::lock_guard lock(mutex_);
        if (const auto it = oracles_.find(key); it != oracles_.end()) return *it->second;
    }
    auto built = load_or_build(spec);
    std::lock_guard lock(mutex_);
    auto& slot = oracles_[key];
    if (!slot) slot = std::move(built);
    return *slot;
}

// ---------------------------------------------------------------------------

namespace {

std::string curve_methods_up_to(const SuccessCurve& curve, double max_length) {
    std::set<std::string> methods;
    for (const auto& [length, p] : curve.points) {
        if (static_cast<double>(length) <= max_length) methods.insert(to_string(p.method));
    }
    std::string out;
    for (const auto& m : methods) {
        if (!out.empty()) out += "+";
        out += m;
    }
    return out;
}

template <typename RunFn>
std::vector<RunResult> execute_runs(const CellKey& key, std::int64_t n_runs,
                                    std::uint64_t seed_base, int threads, RunFn&& run) {
    std::vector<RunResult> results(static_cast<std::size_t>(n_runs));
    parallel_for(n_runs, threads, [&](std::int64_t i) {
        auto& slot = results[static_cast<std::size_t>(i)];
        try {
            slot.record = run(run_seed(seed_base, key, i));
        } catch (const CapExceeded& e) {
            slot.error = e.what();
        } catch (const MissingCurvePoint& e) {
            slot.error = e.what();
        }
    });
    return results;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config, CurveStore& curves) {
    config.validate();
    SweepResult out;

    std::vector<CellKey> cells;
    std::vector<GridworldSpec> hybrid_specs;
    for (int d : config.wall_distances) {
        for (Strategy s : config.strategies) {
            if (is_fixed_length(s)) continue;
            for (int b : config.base_sizes) {
                cells.push_back(CellKey{s, b, d, std::nullopt});
                if (s == Strategy::hybrid) hybrid_specs.emplace_back(b, d);
            }
        }
    }
    curves.prepare(hybrid_specs, config.threads);

    for (const CellKey& key : cells) {
        const GridworldSpec spec(key.base_size, key.wall_distance);
        std::vector<RunResult> results;
        std::string source = "walks";
        switch (key.strategy) {
            case Strategy::hybrid: {
                const EpisodeOracle& oracle = curves.oracle(spec);
                results = execute_runs(key, config.n_runs, config.seed_base, config.threads,
                                       [&](std::uint64_t seed) {
                                           return run_probabilistic_hybrid(oracle, seed,
                                                                           config.iteration_bound);
                                       });
                double longest = 0.0;
                for (const auto& r : results) {
                    if (r.record) longest = std::max(longest, static_cast<double>(r.record->terminal_length));
                }
                source = curve_methods_up_to(oracle.curve(), longest);
                break;
            }
            case Strategy::prob_classical:
                results = execute_runs(key, config.n_runs, config.seed_base, config.threads,
                                       [&](std::uint64_t seed) {
                                           return run_probabilistic_classical(spec, seed);
                                       });
                break;
            case Strategy::unrestricted:
                results = execute_runs(key, config.n_runs, config.seed_base, config.threads,
                                       [&](std::uint64_t seed) {
                                           return run_unrestricted_classical(spec, seed, config.caps);
                                       });
                break;
            case Strategy::fixed_hybrid:
            case Strategy::fixed_classical:
                continue;
        }
        SummaryStats stats = summarize(key, results);
        stats.pinit_source = source;
        out.cells.push_back(std::move(stats));
        if (config.record_runs) {
            for (auto& r : results) {
                if (r.record) out.runs.push_back(*r.record);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::int64_t> default_fixed_grid(const GridworldSpec& spec, std::int64_t count,
                                             std::int64_t max_length) {
    const std::int64_t lo = spec.min_length();
    if (count < 1 || max_length < lo) {
        throw std::invalid_argument("default_fixed_grid: need count >= 1 and max_length >= L_min");
    }
    count = std::min(count, max_length - lo + 1);
    auto make = [&](std::int64_t n) {
        std::vector<std::int64_t> grid;
        if (n == 1) return std::vector<std::int64_t>{lo};
        const double ratio = std::log(static_cast<double>(max_length) / static_cast<double>(lo));
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(lo) * std::exp(ratio * static_cast<double>(i) /
                                                                static_cast<double>(n - 1));
            grid.push_back(std::clamp<std::int64_t>(std::llround(x), lo, max_length));
        }
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        return grid;
    };
    // Rounding merges neighbours at small L; oversample until `count` distinct values remain.
    std::int64_t n = count;
    auto grid = make(n);
    while (static_cast<std::int64_t>(grid.size()) < count) {
        grid = make(++n);
    }
    while (static_cast<std::int64_t>(grid.size()) > count) {
        // Drop interior points closest (in log space) to their left neighbour.
        std::size_t worst = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double gap = std::log(static_cast<double>(grid[i]) / static_cast<double>(grid[i - 1]));
            if (gap < best) {
                best = gap;
                worst = i;
            }
        }
        grid.erase(grid.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return grid;
}

double expected_fixed_length_classical(const FirstHitDistribution& hits, std::int64_t length) {
    if (length > hits.horizon()) {
        throw std::out_of_range("expected_fixed_length_classical: L beyond first-hit horizon");
    }
    const double p = hits.cumulative(length);
    if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
    return static_cast<double>(length) * (1.0 - p) / p + hits.conditional_mean(length);
}

namespace {

// Average of sin^2((2k+1) theta) over k = 0..n-1.
double mean_amplified_probability(double p, std::int64_t n) {
    const double theta = std::asin(std::sqrt(std::clamp(p, 0.0, 1.0)));
    const double s2 = std::sin(2.0 * theta);
    if (n <= 64 || s2 < 1e-6) {
        double sum = 0.0;
        for (std::int64_t k = 0; k < n; ++k) sum += amplified_probability(p, k);
        return sum / static_cast<double>(n);
    }
    const double nd = static_cast<double>(n);
    return std::clamp(0.5 - std::sin(4.0 * nd * theta) / (4.0 * nd * s2), 0.0, 1.0);
}

}  // namespace

double expected_fixed_length_hybrid(double pinit, double conditional_hit_mean, std::int64_t length,
                                    IterationBound bound) {
    if (!(pinit > 0.0)) return std::numeric_limits<double>::infinity();
    const double len = static_cast<double>(length);
    const double m_max = BoyerState::at_length(length).m_max();
    double m = 1.0;
    double reach = 1.0;  // probability that round j is played
    double expected = 0.0;
    for (;;) {
        const std::int64_t n = iteration_choices(m, bound);
        const double success = mean_amplified_probability(pinit, n);
        const double cost = len * static_cast<double>(n - 1) + success * conditional_hit_mean +
                            (1.0 - success) * len;
        if (m >= m_max) {
            // Saturated: every later round is identical, a geometric tail.
            expected += reach * cost / success;
            break;
        }
        expected += reach * cost;
        reach *= 1.0 - success;
        if (reach < 1e-18) break;
        m = std::min(BoyerState::kLambda * m, m_max);
    }
    return expected;
}

EpisodeOracle make_fixed_length_oracle(const GridworldSpec& spec,
                                       const std::vector<std::int64_t>& lengths) {
    if (lengths.empty()) {
        throw std::invalid_argument("make_fixed_length_oracle: no lengths");
    }
    const std::int64_t longest = *std::max_element(lengths.begin(), lengths.end());
    auto hits = first_hit_distribution(spec, longest);
    auto curve = curve_at_lengths(hits, lengths);
    return EpisodeOracle(std::move(curve), std::move(hits));
}

std::vector<FixedLengthPoint> fixed_length_curve(const EpisodeOracle& oracle, Strategy strategy,
                                                 const std::vector<std::int64_t>& lengths,
                                                 std::int64_t n_runs, std::uint64_t seed_base,
                                                 const Caps& caps, int threads,
                                                 IterationBound bound) {
    if (!is_fixed_length(strategy)) {
        throw std::invalid_argument("fixed_length_curve: strategy must be fixed-hybrid or fixed-classical");
    }
    const GridworldSpec& spec = oracle.spec();
    std::vector<FixedLengthPoint> out;
    out.reserve(lengths.size());
    for (std::int64_t length : lengths) {
        const CellKey key{strategy, spec.base_size(), spec.wall_distance(), length};
        std::vector<RunResult> results;
        if (strategy == Strategy::fixed_hybrid) {
            results = execute_runs(key, n_runs, seed_base, threads, [&](std::uint64_t seed) {
                return run_fixed_length_hybrid(oracle, length, seed, caps, bound);
            });
        } else {
            results = execute_runs(key, n_runs, seed_base, threads, [&](std::uint64_t seed) {
                return run_fixed_length_classical(spec, length, seed, caps);
            });
        }
        FixedLengthPoint point;
        point.length = length;
        point.stats = summarize(key, results);
        point.stats.pinit_source = strategy == Strategy::fixed_hybrid ? "exact_dp" : "walks";
        const bool covered = length <= oracle.hits().horizon();
        point.pinit = covered ? oracle.hits().cumulative(length) : std::numeric_limits<double>::quiet_NaN();
        if (!covered) {
            point.expected_n_act = std::numeric_limits<double>::quiet_NaN();
        } else if (strategy == Strategy::fixed_classical) {
            point.expected_n_act = expected_fixed_length_classical(oracle.hits(), length);
        } else {
            point.expected_n_act = expected_fixed_length_hybrid(
                point.pinit, oracle.hits().conditional_mean(length), length, bound);
        }
        out.push_back(std::move(point));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<SavingsRatio> hybrid_vs_classical_ratio(const std::vector<SummaryStats>& stats) {
    std::map<std::pair<int, int>, const SummaryStats*> hybrid;
    std::map<std::pair<int, int>, const SummaryStats*> classical;
    for (const auto& s : stats) {
        if (s.key.length) continue;
        const std::pair key{s.key.base_size, s.key.wall_distance};
        if (s.key.strategy == Strategy::hybrid) hybrid[key] = &s;
        if (s.key.strategy == Strategy::prob_classical) classical[key] = &s;
    }
    std::vector<SavingsRatio> out;
    for (const auto& [key, h] : hybrid) {
        const auto it = classical.find(key);
        if (it == classical.end()) {
            throw std::invalid_argument("no prob-classical cell for b=" + std::to_string(key.first) +
                                        " d_wall=" + std::to_string(key.second));
        }
        const SummaryStats* c = it->second;
        const double q = h->mean_n_act / c->mean_n_act;
        const double rel = std::hypot(h->std_error / h->mean_n_act, c->std_error / c->mean_n_act);
        out.push_back(SavingsRatio{key.first, key.second, 1.0 - q, q * rel});
    }
    for (const auto& [key, c] : classical) {
        if (!hybrid.count(key)) {
            throw std::invalid_argument("no hybrid cell for b=" + std::to_string(key.first) +
                                        " d_wall=" + std::to_string(key.second));
        }
    }
    // Report in (d_wall, b) order like the table.
    std::sort(out.begin(), out.end(), [](const SavingsRatio& a, const SavingsRatio& b) {
        return std::pair{a.wall_distance, a.base_size} < std::pair{b.wall_distance, b.base_size};
    });
    return out;
}

}  // namespace hybridgrid
