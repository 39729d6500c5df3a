#include "hybridgrid/gridworld.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hybridgrid {

std::string_view to_string(Action a) {
    switch (a) {
        case Action::up: return "up";
        case Action::down: return "down";
        case Action::left: return "left";
        case Action::right: return "right";
    }
    return "?";
}

GridworldSpec::GridworldSpec(int base_size, int wall_distance)
    : base_(base_size), wall_(wall_distance) {
    if (base_size < 2) {
        throw std::invalid_argument("base size must be >= 2, got " + std::to_string(base_size));
    }
    if (wall_distance < 0) {
        throw std::invalid_argument("wall distance must be >= 0, got " +
                                    std::to_string(wall_distance));
    }
}

Position step(const GridworldSpec& spec, Position pos, Action a) {
    if (!spec.contains(pos)) {
        throw std::invalid_argument("position (" + std::to_string(pos.x) + "," +
                                    std::to_string(pos.y) + ") outside grid");
    }
    const int last = spec.side() - 1;
    switch (a) {
        case Action::up:
            if (pos.y < last) ++pos.y;
            break;
        case Action::down:
            if (pos.y > 0) --pos.y;
            break;
        case Action::left:
            if (pos.x > 0) --pos.x;
            break;
        case Action::right:
            if (pos.x < last) ++pos.x;
            break;
    }
    return pos;
}

int reward(const GridworldSpec& spec, Position pos, Action a) {
    const Position next = step(spec, pos, a);
    return (next == spec.target() && !(pos == spec.target())) ? 1 : 0;
}

double pinit_min_closed_form(const GridworldSpec& spec) {
    const int n = spec.min_length();
    const int k = spec.base_size() - 1;
    double binom = 1.0;
    for (int i = 1; i <= k; ++i) {
        binom = binom * (n - k + i) / i;
    }
    return std::ldexp(binom, -2 * n);
}

}  // namespace hybridgrid
