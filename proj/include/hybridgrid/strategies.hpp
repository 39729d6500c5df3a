#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hybridgrid/aa_model.hpp"
#include "hybridgrid/gridworld.hpp"
#include "hybridgrid/pinit_oracle.hpp"
#include "hybridgrid/random.hpp"

namespace hybridgrid {

enum class Strategy { hybrid, prob_classical, unrestricted, fixed_hybrid, fixed_classical };

std::string_view to_string(Strategy s);
/// Accepts the CLI names: hybrid, prob-classical, unrestricted, fixed-hybrid, fixed-classical.
Strategy parse_strategy(std::string_view name);
bool is_probabilistic(Strategy s);
bool is_fixed_length(Strategy s);

/// A run that hit its round or step cap before the first reward.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Caps {
    std::int64_t round_cap = 10'000'000;
    std::int64_t step_cap = 1'000'000'000;
};

/// Outcome of one agent run until its first reward.
struct RunRecord {
    Strategy strategy = Strategy::hybrid;
    GridworldSpec spec{2, 0};
    std::int64_t n_act = 0;         // total environment actions
    std::int64_t terminal_length = 0;
    std::int64_t success_step = 0;  // step within the final episode that was rewarded
    std::int64_t n_aa_rounds = 0;
    std::int64_t n_doublings = 0;
    std::int64_t n_episodes = 0;    // verification or classical episodes played
    std::int64_t aa_actions = 0;    // sum of 2 k L over amplification rounds
    std::int64_t episode_actions = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Empty when the record satisfies the accounting and parity invariants;
/// otherwise a description of the first violation.
std::optional<std::string> check_invariants(const RunRecord& r);

/// Read-only tables that stand in for the environment during amplification:
/// p_init per episode length and the exact first-hit law used to draw the
/// rewarded step of a successful verification episode.
class EpisodeOracle {
public:
    EpisodeOracle(SuccessCurve curve, FirstHitDistribution hits);

    const GridworldSpec& spec() const { return curve_.spec; }
    const SuccessCurve& curve() const { return curve_; }
    const FirstHitDistribution& hits() const { return hits_; }

    /// Throws MissingCurvePoint when the curve lacks `length`.
    double pinit(std::int64_t length) const { return curve_.at(length); }

    /// Step of first target entry, conditioned on success within `length`.
    /// Beyond the first-hit horizon, falls back to rejection sampling with
    /// actual walks (success is likely there).
    std::int64_t sample_hit_step(std::int64_t length, Rng& rng) const;

private:
    SuccessCurve curve_;
    FirstHitDistribution hits_;
};

/// Default first-hit horizon: the curve's largest length, capped so the DP
/// stays within `update_budget` cell updates.
std::int64_t default_hit_horizon(const SuccessCurve& curve, double update_budget = 2e9);

EpisodeOracle make_oracle(SuccessCurve curve, std::optional<std::int64_t> hit_horizon = {});

RunRecord run_probabilistic_hybrid(const EpisodeOracle& oracle, std::uint64_t seed,
                                   IterationBound bound = IterationBound::floor);

RunRecord run_probabilistic_classical(const GridworldSpec& spec, std::uint64_t seed);

/// Probabilistic classical schedule with each episode replaced by a draw of
/// (success ~ Bernoulli(p_init(L)), hit step ~ conditional first-hit law).
/// Used to check that the sampling shortcut of the hybrid path is faithful.
RunRecord run_probabilistic_classical_sampled(const EpisodeOracle& oracle, std::uint64_t seed);

/// Throws CapExceeded when the walk exceeds caps.step_cap.
RunRecord run_unrestricted_classical(const GridworldSpec& spec, std::uint64_t seed,
                                     const Caps& caps = {});

/// Amplification at a constant episode length. Throws CapExceeded after
/// caps.round_cap rounds, or immediately when p_init(L) = 0.
RunRecord run_fixed_length_hybrid(const EpisodeOracle& oracle, std::int64_t length,
                                  std::uint64_t seed, const Caps& caps = {},
                                  IterationBound bound = IterationBound::floor);

/// Repeated walks of at most `length` steps until the first reward.
RunRecord run_fixed_length_classical(const GridworldSpec& spec, std::int64_t length,
                                     std::uint64_t seed, const Caps& caps = {});

}  // namespace hybridgrid
