#include "hybridgrid/walk.hpp"

#include <algorithm>

namespace hybridgrid {

std::int64_t random_walk_hit(const GridworldSpec& spec, std::int64_t max_steps, Rng& rng) {
    // Two random bits per action, indexed like Action: up, down, left, right.
    static constexpr int dx[4] = {0, 0, -1, 1};
    static constexpr int dy[4] = {1, -1, 0, 0};

    const int last = spec.side() - 1;
    const Position target = spec.target();
    Position p = spec.start();

    std::int64_t t = 0;
    while (t < max_steps) {
        std::uint64_t bits = rng();
        const std::int64_t chunk = std::min<std::int64_t>(32, max_steps - t);
        for (std::int64_t i = 0; i < chunk; ++i) {
            const int a = static_cast<int>(bits & 3U);
            bits >>= 2;
            p.x = std::clamp(p.x + dx[a], 0, last);
            p.y = std::clamp(p.y + dy[a], 0, last);
            if (p.x == target.x && p.y == target.y) {
                return t + i + 1;
            }
        }
        t += chunk;
    }
    return 0;
}

}  // namespace hybridgrid
