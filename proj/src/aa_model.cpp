#include "hybridgrid/aa_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hybridgrid/gridworld.hpp"

namespace hybridgrid {

namespace {
constexpr double kSlack = 1e-12;
}

double BoyerState::m_max() const {
    return std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(length, 2048)));
}

BoyerState BoyerState::at_length(std::int64_t length) {
    if (length < 1) {
        throw std::invalid_argument("episode length must be >= 1");
    }
    BoyerState s;
    s.length = length;
    return s;
}

double amplified_probability(double p, std::int64_t k) {
    if (!(p >= -kSlack && p <= 1.0 + kSlack)) {
        throw std::invalid_argument("amplified_probability: p=" + std::to_string(p) +
                                    " outside [0, 1]");
    }
    if (k < 0) {
        throw std::invalid_argument("amplified_probability: k must be >= 0");
    }
    p = std::clamp(p, 0.0, 1.0);
    const double theta = std::asin(std::sqrt(p));
    const double s = std::sin(static_cast<double>(2 * k + 1) * theta);
    return std::clamp(s * s, 0.0, 1.0);
}

std::int64_t iteration_choices(double m, IterationBound bound) {
    const double rounded = bound == IterationBound::floor ? std::floor(m) : std::ceil(m);
    // m never exceeds 2^L; the cap only guards the integer conversion for huge L.
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::min(rounded, 0x1.0p62)));
}

std::int64_t sample_k(const BoyerState& state, Rng& rng, IterationBound bound) {
    const std::int64_t n = iteration_choices(state.m, bound);
    if (n == 1) return 0;
    return std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
}

BoyerState grow_m(BoyerState state) {
    state.m = std::min(state.lambda * state.m, state.m_max());
    return state;
}

double jump_probability(double m, std::int64_t length) {
    if (m < 1.0 || length < 1) {
        throw std::invalid_argument("jump_probability: requires m >= 1 and L >= 1");
    }
    const double phi = 2.0 * std::log(m) / (static_cast<double>(length) * std::log(double{kNumActions}));
    // Within rounding of the critical stage the doubling is certain.
    if (phi >= 1.0 - kSlack) return 1.0;
    return std::clamp(phi, 0.0, 1.0);
}

}  // namespace hybridgrid
