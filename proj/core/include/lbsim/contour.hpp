#pragma once

#include <optional>
#include <vector>

#include "lbsim/types.hpp"

namespace lbsim {

/// One unit edge of a wire boundary: a wire cell plus the side facing a
/// non-wire cell (or the grid edge). A boundary follower walks these with the
/// wall on its left, so consecutive cells may be Moore (diagonal) neighbours.
struct Crack {
  Point cell;
  Dir wall = Dir::North;
  friend constexpr bool operator==(const Crack&, const Crack&) = default;
};

/// Left-hand wall following over a 4-connected wire. `member(p)` must return
/// false outside the grid.
template <typename Member>
Crack next_crack(const Crack& c, Member&& member) {
  const Dir heading = turn_right(c.wall);
  const Point front = step(c.cell, heading);
  if (!member(front)) return Crack{c.cell, heading};
  const Point front_left = step(front, c.wall);
  if (member(front_left)) return Crack{front_left, reverse(heading)};
  return Crack{front, c.wall};
}

/// First crack of a boundary cell in East/South/West/North order.
template <typename Member>
std::optional<Crack> first_crack(Point cell, Member&& member) {
  for (Dir d : kDirs)
    if (!member(step(cell, d))) return Crack{cell, d};
  return std::nullopt;
}

/// The full loop starting at `start`, start included once.
template <typename Member>
std::vector<Crack> trace_loop(const Crack& start, Member&& member) {
  std::vector<Crack> loop{start};
  for (Crack c = next_crack(start, member); !(c == start); c = next_crack(c, member))
    loop.push_back(c);
  return loop;
}

}  // namespace lbsim
