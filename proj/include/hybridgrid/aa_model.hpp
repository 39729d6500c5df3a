#pragma once

#include <cstdint>

#include "hybridgrid/random.hpp"

namespace hybridgrid {

/// Scheduler state of Grover search with an unknown number of solutions.
///
/// `m` bounds the uniformly drawn iteration count and grows by `lambda` after
/// every unrewarded round until it saturates at `m_max = sqrt(|A|^L)`, the
/// critical stage for the lower bound p_min = |A|^-L.
struct BoyerState {
    static constexpr double kLambda = 1.25;

    double m = 1.0;
    double lambda = kLambda;
    std::int64_t length = 1;

    /// sqrt(4^L) = 2^L; overflows to +inf for L > 1023, which is harmless as a cap.
    double m_max() const;

    static BoyerState at_length(std::int64_t length);
};

/// sin^2((2k+1) * asin(sqrt(p))), clamped to [0, 1]. Rejects p outside
/// [-1e-12, 1 + 1e-12].
double amplified_probability(double p, std::int64_t k);

/// How a real-valued bound m becomes the set of admissible iteration counts.
///  - floor: {0, ..., max(1, floor(m)) - 1}, the truncating draw that reproduces
///    the published hybrid results;
///  - ceil:  every integer strictly below m, {0, ..., ceil(m) - 1}.
enum class IterationBound { floor, ceil };

/// Number of admissible iteration counts for bound m (at least 1).
std::int64_t iteration_choices(double m, IterationBound bound);

/// Uniform draw of the amplification iteration count k.
std::int64_t sample_k(const BoyerState& state, Rng& rng,
                      IterationBound bound = IterationBound::floor);

/// m' = min(lambda * m, m_max).
BoyerState grow_m(BoyerState state);

/// 2 log(m) / (L log |A|), clamped to [0, 1]; reaches 1 at m = m_max.
double jump_probability(double m, std::int64_t length);

}  // namespace hybridgrid
