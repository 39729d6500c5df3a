#include "hybridgrid/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "hybridgrid/aa_model.hpp"
#include "hybridgrid/walk.hpp"

namespace hybridgrid {

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::hybrid: return "hybrid";
        case Strategy::prob_classical: return "prob-classical";
        case Strategy::unrestricted: return "unrestricted";
        case Strategy::fixed_hybrid: return "fixed-hybrid";
        case Strategy::fixed_classical: return "fixed-classical";
    }
    return "?";
}

Strategy parse_strategy(std::string_view name) {
    for (Strategy s : {Strategy::hybrid, Strategy::prob_classical, Strategy::unrestricted,
                       Strategy::fixed_hybrid, Strategy::fixed_classical}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown strategy '" + std::string(name) +
                                "' (expected hybrid, prob-classical, unrestricted, fixed-hybrid "
                                "or fixed-classical)");
}

bool is_probabilistic(Strategy s) {
    return s == Strategy::hybrid || s == Strategy::prob_classical;
}

bool is_fixed_length(Strategy s) {
    return s == Strategy::fixed_hybrid || s == Strategy::fixed_classical;
}

std::optional<std::string> check_invariants(const RunRecord& r) {
    const std::int64_t lmin = r.spec.min_length();
    if (r.success_step < lmin) return "success_step below L_min";
    if (r.success_step > r.terminal_length) return "success_step exceeds terminal episode length";
    if (r.n_act < r.success_step) return "n_act below success_step";
    if (r.n_act != r.aa_actions + r.episode_actions) return "n_act differs from AA plus episode actions";
    if (r.success_step % 2 != 0 && r.success_step < lmin + 2 * r.spec.wall_distance() + 1) {
        return "odd success_step without room for a wall bump";
    }
    if (is_probabilistic(r.strategy)) {
        if (r.terminal_length != (std::int64_t{1} << r.n_doublings)) {
            return "terminal length is not 2^n_doublings";
        }
        if (r.terminal_length < lmin) return "terminal length below L_min";
    }
    if (r.strategy != Strategy::hybrid && r.strategy != Strategy::fixed_hybrid) {
        if (r.n_aa_rounds != 0 || r.aa_actions != 0) return "classical run with AA cost";
    }
    if (r.strategy == Strategy::unrestricted &&
        !(r.n_act == r.terminal_length && r.n_act == r.success_step)) {
        return "unrestricted run with inconsistent step counts";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

EpisodeOracle::EpisodeOracle(SuccessCurve curve, FirstHitDistribution hits)
    : curve_(std::move(curve)), hits_(std::move(hits)) {
    if (!(curve_.spec == hits_.spec())) {
        throw std::invalid_argument("EpisodeOracle: curve and first-hit law describe different grids");
    }
}

std::int64_t EpisodeOracle::sample_hit_step(std::int64_t length, Rng& rng) const {
    if (length <= hits_.horizon()) {
        return hits_.sample_conditional(length, rng);
    }
    for (;;) {
        if (const std::int64_t t = random_walk_hit(spec(), length, rng); t != 0) {
            return t;
        }
    }
}

std::int64_t default_hit_horizon(const SuccessCurve& curve, double update_budget) {
    const std::int64_t longest = curve.points.empty() ? 1 : curve.points.rbegin()->first;
    const auto affordable =
        static_cast<std::int64_t>(update_budget / static_cast<double>(curve.spec.num_cells()));
    return std::max<std::int64_t>(1, std::min(longest, affordable));
}

EpisodeOracle make_oracle(SuccessCurve curve, std::optional<std::int64_t> hit_horizon) {
    const std::int64_t horizon = hit_horizon.value_or(default_hit_horizon(curve));
    auto hits = first_hit_distribution(curve.spec, horizon);
    return EpisodeOracle(std::move(curve), std::move(hits));
}

// ---------------------------------------------------------------------------

namespace {

RunRecord start_record(Strategy strategy, const GridworldSpec& spec, std::uint64_t seed) {
    RunRecord r;
    r.strategy = strategy;
    r.spec = spec;
    r.seed = seed;
    return r;
}

void finish(RunRecord& r, std::int64_t length, std::int64_t hit_step) {
    r.terminal_length = length;
    r.success_step = hit_step;
    r.episode_actions += hit_step;
    r.n_act = r.aa_actions + r.episode_actions;
}

/// Doubling check at the head of every loop of the probabilistic schedule.
void maybe_double(BoyerState& state, RunRecord& r, Rng& rng) {
    if (uniform01(rng) < jump_probability(state.m, state.length)) {
        state.length *= 2;
        state.m = 1.0;
        ++r.n_doublings;
    }
}

}  // namespace

RunRecord run_probabilistic_hybrid(const EpisodeOracle& oracle, std::uint64_t seed,
                                   IterationBound bound) {
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::hybrid, oracle.spec(), seed);
    BoyerState state = BoyerState::at_length(1);
    for (;;) {
        maybe_double(state, r, rng);
        const std::int64_t length = state.length;
        const double p = oracle.pinit(length);

        const std::int64_t k = sample_k(state, rng, bound);
        r.aa_actions += 2 * k * length;
        ++r.n_aa_rounds;
        ++r.n_episodes;

        if (uniform01(rng) < amplified_probability(p, k)) {
            finish(r, length, oracle.sample_hit_step(length, rng));
            return r;
        }
        r.episode_actions += length;
        state = grow_m(state);
    }
}

RunRecord run_probabilistic_classical(const GridworldSpec& spec, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::prob_classical, spec, seed);
    BoyerState state = BoyerState::at_length(1);
    for (;;) {
        maybe_double(state, r, rng);
        ++r.n_episodes;
        if (const std::int64_t t = random_walk_hit(spec, state.length, rng); t != 0) {
            finish(r, state.length, t);
            return r;
        }
        r.episode_actions += state.length;
        state = grow_m(state);
    }
}

RunRecord run_probabilistic_classical_sampled(const EpisodeOracle& oracle, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::prob_classical, oracle.spec(), seed);
    BoyerState state = BoyerState::at_length(1);
    for (;;) {
        maybe_double(state, r, rng);
        ++r.n_episodes;
        if (uniform01(rng) < oracle.pinit(state.length)) {
            finish(r, state.length, oracle.sample_hit_step(state.length, rng));
            return r;
        }
        r.episode_actions += state.length;
        state = grow_m(state);
    }
}

RunRecord run_unrestricted_classical(const GridworldSpec& spec, std::uint64_t seed,
                                     const Caps& caps) {
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::unrestricted, spec, seed);
    const std::int64_t t = random_walk_hit(spec, caps.step_cap, rng);
    if (t == 0) {
        throw CapExceeded("unrestricted walk exceeded the step cap of " +
                          std::to_string(caps.step_cap));
    }
    r.n_episodes = 1;
    finish(r, t, t);
    return r;
}

RunRecord run_fixed_length_hybrid(const EpisodeOracle& oracle, std::int64_t length,
                                  std::uint64_t seed, const Caps& caps, IterationBound bound) {
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::fixed_hybrid, oracle.spec(), seed);
    const double p = oracle.pinit(length);
    if (!(p > 0.0)) {
        throw CapExceeded("fixed-length hybrid at L=" + std::to_string(length) +
                          " cannot succeed (p_init = 0)");
    }
    BoyerState state = BoyerState::at_length(length);
    for (std::int64_t round = 0; round < caps.round_cap; ++round) {
        const std::int64_t k = sample_k(state, rng, bound);
        r.aa_actions += 2 * k * length;
        ++r.n_aa_rounds;
        ++r.n_episodes;
        if (uniform01(rng) < amplified_probability(p, k)) {
            finish(r, length, oracle.sample_hit_step(length, rng));
            return r;
        }
        r.episode_actions += length;
        state = grow_m(state);
    }
    throw CapExceeded("fixed-length hybrid at L=" + std::to_string(length) + " exceeded " +
                      std::to_string(caps.round_cap) + " rounds");
}

RunRecord run_fixed_length_classical(const GridworldSpec& spec, std::int64_t length,
                                     std::uint64_t seed, const Caps& caps) {
    if (length < 1) {
        throw std::invalid_argument("fixed-length classical requires L >= 1");
    }
    if (length < spec.min_length()) {
        throw CapExceeded("fixed-length classical at L=" + std::to_string(length) +
                          " cannot reach the target (L < L_min)");
    }
    Rng rng = make_rng(seed);
    RunRecord r = start_record(Strategy::fixed_classical, spec, seed);
    for (std::int64_t round = 0; round < caps.round_cap; ++round) {
        ++r.n_episodes;
        if (const std::int64_t t = random_walk_hit(spec, length, rng); t != 0) {
            finish(r, length, t);
            return r;
        }
        r.episode_actions += length;
    }
    throw CapExceeded("fixed-length classical at L=" + std::to_string(length) + " exceeded " +
                      std::to_string(caps.round_cap) + " rounds");
}

}  // namespace hybridgrid
