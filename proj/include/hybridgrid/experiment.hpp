#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hybridgrid/aa_model.hpp"
#include "hybridgrid/gridworld.hpp"
#include "hybridgrid/pinit_oracle.hpp"
#include "hybridgrid/strategies.hpp"

namespace hybridgrid {

struct ExperimentConfig {
    std::vector<Strategy> strategies{Strategy::hybrid, Strategy::prob_classical,
                                     Strategy::unrestricted};
    std::vector<int> base_sizes{5, 6, 7, 8, 9};
    std::vector<int> wall_distances{0, 4, 8, 16, 32, 64};
    std::int64_t n_runs = 10000;
    std::uint64_t seed_base = 0;
    /// Episode lengths for fixed-length strategies; empty selects default_fixed_grid().
    std::vector<std::int64_t> fixed_lengths;
    std::int64_t fixed_grid_points = 868;
    std::int64_t fixed_grid_max = std::int64_t{1} << 14;
    Caps caps{};
    CurveOptions curve{};
    IterationBound iteration_bound = IterationBound::floor;
    /// 0 selects the hardware concurrency.
    int threads = 0;
    bool record_runs = false;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Identity of one aggregation cell.
struct CellKey {
    Strategy strategy = Strategy::hybrid;
    int base_size = 0;
    int wall_distance = 0;
    std::optional<std::int64_t> length;  // fixed-length strategies only

    friend bool operator==(const CellKey&, const CellKey&) = default;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

std::string describe(const CellKey& key);

/// Injective 32-bit cell code: strategy in bits 29..31; then either base size
/// (bits 16..28) and wall distance (bits 0..15), or for fixed-length cells the
/// episode length in bits 0..28.
std::uint32_t cell_code(const CellKey& key);

/// Seed of run `run_index` in `key`: derive_seed(seed_base, cell_code(key), run_index).
std::uint64_t run_seed(std::uint64_t seed_base, const CellKey& key, std::int64_t run_index);

/// Histogram bin of a terminal episode length: the length itself for the
/// doubling and fixed-length strategies, the enclosing power-of-two bin
/// [2^j, 2^(j+1)) otherwise.
std::int64_t histogram_bin(Strategy strategy, std::int64_t terminal_length);

struct SummaryStats {
    CellKey key;
    double mean_n_act = 0.0;
    /// Sample standard deviation / sqrt(N); NaN when fewer than two runs completed.
    double std_error = 0.0;
    double mean_terminal_length = 0.0;
    double mean_success_step = 0.0;
    std::map<std::int64_t, double> terminal_histogram;
    std::int64_t n_runs = 0;
    std::int64_t n_completed = 0;
    std::int64_t n_errors = 0;
    std::string first_error;
    /// Estimation methods behind the p_init values a hybrid cell consumed, or "walks".
    std::string pinit_source;

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct RunResult {
    std::optional<RunRecord> record;
    std::string error;
};

/// Aggregates in index order, so the result does not depend on which worker
/// produced which run.
SummaryStats summarize(const CellKey& key, const std::vector<RunResult>& runs);

/// Calls fn(i) for i in [0, n) on up to `threads` workers with dynamic
/// chunked scheduling. Exceptions from fn propagate after all workers stop.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

int effective_threads(int requested);

/// Builds, loads and memoizes one EpisodeOracle per grid.
class CurveStore {
public:
    CurveStore(CurveOptions options, std::optional<std::filesystem::path> cache_dir,
               bool allow_build = true, std::uint64_t curve_seed = 0);

    /// Makes oracles for all `specs` available (curves built concurrently).
    void prepare(const std::vector<GridworldSpec>& specs, int threads);

    /// Throws CacheError / CacheNotFound when building is disallowed and no
    /// cached curve exists.
    const EpisodeOracle& oracle(const GridworldSpec& spec);

    const CurveOptions& options() const { return options_; }
    /// Human-readable record of cache hits, misses and builds, in request order.
    std::vector<std::string> log() const;

private:
    std::shared_ptr<const EpisodeOracle> load_or_build(const GridworldSpec& spec);

    CurveOptions options_;
    std::optional<std::filesystem::path> cache_dir_;
    bool allow_build_;
    std::uint64_t curve_seed_;
    mutable std::mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const EpisodeOracle>> oracles_;
    std::vector<std::string> log_;
};

struct SweepResult {
    std::vector<SummaryStats> cells;
    std::vector<RunRecord> runs;  // only when config.record_runs
};

/// Runs every (strategy, base size, wall distance) cell of the configuration.
/// Fixed-length strategies are skipped here; see fixed_length_curve.
SweepResult run_sweep(const ExperimentConfig& config, CurveStore& curves);

// ---------------------------------------------------------------------------
// Fixed episode length

/// `count` distinct integers, log-spaced over [L_min, max_length].
std::vector<std::int64_t> default_fixed_grid(const GridworldSpec& spec, std::int64_t count = 868,
                                             std::int64_t max_length = std::int64_t{1} << 14);

/// L (1 - p) / p + E[T | T <= L] with p = P(T <= L) from the first-hit law.
double expected_fixed_length_classical(const FirstHitDistribution& hits, std::int64_t length);

/// Expected actions of the constant-length amplification loop, summed round
/// by round: round j draws k uniformly from the admissible set for
/// m_j = min(1.25^j, 2^L), pays 2 k L plus a verification episode, and
/// succeeds with sin^2((2k+1) asin(sqrt(p))).
double expected_fixed_length_hybrid(double pinit, double conditional_hit_mean, std::int64_t length,
                                    IterationBound bound = IterationBound::floor);

struct FixedLengthPoint {
    std::int64_t length = 0;
    double pinit = 0.0;
    SummaryStats stats;
    double expected_n_act = 0.0;  // exact expectation from the first-hit law
};

/// Monte-Carlo means per episode length for fixed_hybrid or fixed_classical.
/// `oracle` must cover every length in `lengths` for the hybrid, and is used
/// for the exact expectation column in both cases.
std::vector<FixedLengthPoint> fixed_length_curve(const EpisodeOracle& oracle, Strategy strategy,
                                                 const std::vector<std::int64_t>& lengths,
                                                 std::int64_t n_runs, std::uint64_t seed_base,
                                                 const Caps& caps = {}, int threads = 0,
                                                 IterationBound bound = IterationBound::floor);

/// Oracle whose curve holds exact p_init at every length in `lengths`.
EpisodeOracle make_fixed_length_oracle(const GridworldSpec& spec,
                                       const std::vector<std::int64_t>& lengths);

// ---------------------------------------------------------------------------

struct SavingsRatio {
    int base_size = 0;
    int wall_distance = 0;
    double ratio = 0.0;      // 1 - mean_hybrid / mean_prob_classical
    double std_error = 0.0;  // first-order propagation of both cells' errors
};

/// One entry per (b, d_wall) holding both probabilistic strategies. Throws
/// std::invalid_argument if a hybrid cell lacks its classical partner or vice versa.
std::vector<SavingsRatio> hybrid_vs_classical_ratio(const std::vector<SummaryStats>& stats);

}  // namespace hybridgrid
