#pragma once

#include <cstdint>

#include "hybridgrid/gridworld.hpp"
#include "hybridgrid/random.hpp"

namespace hybridgrid {

/// Uniform random walk from the start cell for at most `max_steps` actions.
/// Returns the step (1-based) at which the target was first entered, or 0 if
/// the walk ran out of steps.
std::int64_t random_walk_hit(const GridworldSpec& spec, std::int64_t max_steps, Rng& rng);

}  // namespace hybridgrid
