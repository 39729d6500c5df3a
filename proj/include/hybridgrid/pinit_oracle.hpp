#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridgrid/gridworld.hpp"
#include "hybridgrid/random.hpp"

namespace hybridgrid {

enum class EstimateMethod { monte_carlo, exact_dp, interpolated };

std::string to_string(EstimateMethod m);
EstimateMethod parse_estimate_method(const std::string& s);

struct CurvePoint {
    std::int64_t length = 0;
    double estimate = 0.0;
    std::int64_t n_shots = 0;
    std::int64_t n_success = 0;
    EstimateMethod method = EstimateMethod::exact_dp;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Thrown when a strategy asks for p_init at a length the curve does not hold.
class MissingCurvePoint : public std::runtime_error {
public:
    MissingCurvePoint(const GridworldSpec& spec, std::int64_t length);
    std::int64_t length() const { return length_; }

private:
    std::int64_t length_;
};

struct SuccessCurve {
    GridworldSpec spec{2, 0};
    std::map<std::int64_t, CurvePoint> points;
    std::optional<std::int64_t> converged_at;

    bool has(std::int64_t length) const { return points.count(length) != 0; }
    /// Throws MissingCurvePoint when absent.
    double at(std::int64_t length) const;
    /// Points whose Monte-Carlo estimate stopped at the shot cap short of the success target.
    std::vector<std::int64_t> low_confidence_lengths(std::int64_t min_successes) const;

    friend bool operator==(const SuccessCurve&, const SuccessCurve&) = default;
};

// ---------------------------------------------------------------------------
// Exact occupation-vector propagation

/// Forward propagation of the uniform walk's cell-occupation distribution with
/// an absorbing target. Memory: two vectors of side^2 doubles.
class OccupationPropagator {
public:
    explicit OccupationPropagator(const GridworldSpec& spec);

    /// Advances one step and returns the mass absorbed at this step.
    double advance();

    std::int64_t steps() const { return steps_; }
    double absorbed() const { return absorbed_; }
    /// Mass still wandering; equals 1 - absorbed() up to rounding.
    double remaining() const;

private:
    GridworldSpec spec_;
    std::vector<double> cur_;
    std::vector<double> next_;
    std::int64_t steps_ = 0;
    double absorbed_ = 0.0;
    int target_index_;
};

/// Probability that a uniform walk from start enters the target within `length` steps.
double exact_dp(const GridworldSpec& spec, std::int64_t length);

/// Exact law of the first hitting time, truncated at a horizon.
class FirstHitDistribution {
public:
    /// `mass[t-1]` is the probability of first entry at step t; `failure_mass`
    /// is the mass still unabsorbed at the horizon.
    FirstHitDistribution(GridworldSpec spec, std::vector<double> mass, double failure_mass);

    const GridworldSpec& spec() const { return spec_; }
    std::int64_t horizon() const { return static_cast<std::int64_t>(mass_.size()); }

    /// Probability of first reaching the target at exactly step t (0 outside [1, horizon]).
    double mass(std::int64_t t) const;
    /// P(T <= t), t clamped to the horizon.
    double cumulative(std::int64_t t) const;
    double failure_mass() const { return failure_mass_; }
    /// E[T | T <= t]; NaN when P(T <= t) = 0.
    double conditional_mean(std::int64_t t) const;

    /// Draws T conditioned on T <= length. Requires length <= horizon and
    /// cumulative(length) > 0.
    std::int64_t sample_conditional(std::int64_t length, Rng& rng) const;

private:
    GridworldSpec spec_;
    std::vector<double> mass_;
    std::vector<double> cumulative_;  // compensated running sum of mass_
    std::vector<double> weighted_;    // running sum of t * mass(t)
    double failure_mass_;
};

FirstHitDistribution first_hit_distribution(const GridworldSpec& spec, std::int64_t length);

// ---------------------------------------------------------------------------
// Monte-Carlo estimation

struct McOptions {
    std::int64_t batch_size = std::int64_t{1} << 14;
    std::int64_t min_successes = 16;
    std::int64_t shot_cap = std::int64_t{1} << 24;
};

/// Batches of uniform walks of at most `length` steps until `min_successes`
/// hits or `shot_cap` shots. A capped point keeps its raw counts.
CurvePoint estimate_mc(const GridworldSpec& spec, std::int64_t length, Rng& rng,
                       const McOptions& options = {});

// ---------------------------------------------------------------------------
// Expected hitting time

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact expected number of steps for the unrestricted walk to first reach the
/// target, from the sparse hitting-time system on the full grid. Throws
/// SolverError if the residual exceeds `tolerance`.
double expected_first_passage(const GridworldSpec& spec, double tolerance = 1e-10);

// ---------------------------------------------------------------------------
// Curves

enum class CurvePolicy { mc, exact, hybrid };

std::string to_string(CurvePolicy p);
CurvePolicy parse_curve_policy(const std::string& s);

struct CurveOptions {
    CurvePolicy policy = CurvePolicy::hybrid;
    double convergence = 0.999;
    std::int64_t max_length = std::int64_t{1} << 22;
    /// DP is used for a point while side^2 * L stays within this many updates.
    double dp_budget = 1e10;
    McOptions mc{};
};

/// p_init at L = 1, 2, 4, ... until the estimate reaches the convergence
/// threshold or L reaches max_length.
SuccessCurve build_curve(const GridworldSpec& spec, Rng& rng, const CurveOptions& options = {});

/// Exact points at arbitrary lengths, read off one truncated first-hit distribution.
SuccessCurve curve_at_lengths(const FirstHitDistribution& hits,
                              const std::vector<std::int64_t>& lengths);

/// Linearly interpolated points at `lengths`, for plotting only.
SuccessCurve interpolate(const SuccessCurve& curve, const std::vector<std::int64_t>& lengths);

// ---------------------------------------------------------------------------
// Cache

class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CacheNotFound : public CacheError {
public:
    using CacheError::CacheError;
};

struct CacheKey {
    int base_size = 0;
    int wall_distance = 0;
    std::string method;
    std::int64_t batch_size = 0;
    std::string stopping_rule;

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

CacheKey cache_key(const GridworldSpec& spec, const CurveOptions& options);
std::string stopping_rule(const CurveOptions& options);

/// Canonical file name for a key inside a cache directory.
std::filesystem::path cache_path(const std::filesystem::path& dir, const CacheKey& key);

/// Writes to a sibling temporary file, then renames over `path`.
void cache_store(const std::filesystem::path& path, const SuccessCurve& curve,
                 const CacheKey& key);

/// Throws CacheNotFound for an absent file and CacheError for corrupt or
/// key-mismatched files.
SuccessCurve cache_load(const std::filesystem::path& path, const CacheKey& expected);

/// Same checks as cache_load except the key comparison.
SuccessCurve cache_load_any(const std::filesystem::path& path);

}  // namespace hybridgrid
