#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace hybridgrid {

enum class Action : std::uint8_t { up = 0, down = 1, left = 2, right = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions{Action::up, Action::down,
                                                             Action::left, Action::right};

std::string_view to_string(Action a);

struct Position {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const Position&, const Position&) = default;
};

constexpr int manhattan(Position a, Position b) {
    const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx + dy;
}

/// Square Gridworld: a b x b base area surrounded by a free ring of width
/// `wall_distance`, enclosed by walls. The origin is the lower-left cell of the
/// ring; start and target sit at diagonally opposite base-area corners.
class GridworldSpec {
public:
    GridworldSpec(int base_size, int wall_distance);

    int base_size() const { return base_; }
    int wall_distance() const { return wall_; }
    int side() const { return base_ + 2 * wall_; }
    int num_cells() const { return side() * side(); }
    int min_length() const { return 2 * (base_ - 1); }

    Position start() const { return {wall_, wall_}; }
    Position target() const { return {wall_ + base_ - 1, wall_ + base_ - 1}; }

    bool contains(Position p) const {
        return p.x >= 0 && p.y >= 0 && p.x < side() && p.y < side();
    }
    int index(Position p) const { return p.y * side() + p.x; }

    friend bool operator==(const GridworldSpec&, const GridworldSpec&) = default;

private:
    int base_;
    int wall_;
};

/// Moves one cell in direction `a`; a move into an outer wall leaves `pos` unchanged.
/// Throws std::invalid_argument if `pos` is outside the grid.
Position step(const GridworldSpec& spec, Position pos, Action a);

/// 1 iff the move lands on the target cell.
int reward(const GridworldSpec& spec, Position pos, Action a);

/// binomial(2(b-1), b-1) * 4^(-2(b-1)): the share of length-L_min action
/// sequences that are shortest monotone paths to the target.
double pinit_min_closed_form(const GridworldSpec& spec);

}  // namespace hybridgrid
