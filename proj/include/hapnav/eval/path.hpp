/*
Copyright 2026 The hapnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HAPNAV_EVAL_PATH_HPP
#define HAPNAV_EVAL_PATH_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hapnav/world/world_spec.hpp"

namespace hapnav::eval {

using world::Cell;
using world::Dir;
using world::WorldSpec;

class NoPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct Move {
  int dr = 0;
  int dc = 0;
};

/// The eight grid moves, counter-clockwise from east.
inline constexpr Move kMoves[8] = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}};

/// Cost of moving from `c` by `m`, infinite when blocked. A
/// diagonal needs both cells it cuts between to be free.
inline double move_cost(const WorldSpec& w, Cell c, Move m) {
  const Cell n{c.row + m.dr, c.col + m.dc};
  if (w.is_blocked(n)) return kUnreachable;
  if (m.dr != 0 && m.dc != 0) {
    if (w.is_blocked({c.row + m.dr, c.col}) || w.is_blocked({c.row, c.col + m.dc})) return kUnreachable;
    return w.cell_size * std::numbers::sqrt2;
  }
  return w.cell_size;
}

/// Shortest corridor distances from every cell to one goal cell.
class DistanceField {
 public:
  DistanceField(const WorldSpec& w, Cell goal) : w_(&w), goal_(goal) {
    if (w.is_blocked(goal)) throw NoPath("goal cell is an obstacle");
    dist_.assign(static_cast<std::size_t>(w.rows * w.cols), kUnreachable);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist_[index(goal)] = 0.0;
    open.push({0.0, static_cast<int>(index(goal))});
    while (!open.empty()) {
      const auto [d, i] = open.top();
      open.pop();
      if (d > dist_[static_cast<std::size_t>(i)]) continue;
      const Cell c{i / w.cols, i % w.cols};
      // moves are symmetric, so distance-to-goal equals distance-from-goal
      for (const auto& m : kMoves) {
        const double cost = move_cost(w, c, m);
        if (cost == kUnreachable) continue;
        const Cell n{c.row + m.dr, c.col + m.dc};
        const double nd = d + cost;
        if (nd < dist_[index(n)]) {
          dist_[index(n)] = nd;
          open.push({nd, static_cast<int>(index(n))});
        }
      }
    }
  }

  Cell goal() const { return goal_; }
  double at(Cell c) const { return w_->in_bounds(c) ? dist_[index(c)] : kUnreachable; }

  /// True when leaving `c` through `d` starts some shortest route to the
  /// goal. A diagonal route counts for both directions it is composed of.
  bool on_shortest_route(Cell c, Dir d) const {
    const double here = at(c);
    if (here == kUnreachable) throw NoPath("no route from cell to goal");
    const int base = 2 * static_cast<int>(d);
    for (int off : {0, 1, 7}) {
      const Move m = kMoves[(base + off) % 8];
      const double cost = move_cost(*w_, c, m);
      if (cost == kUnreachable) continue;
      const double via = cost + at({c.row + m.dr, c.col + m.dc});
      if (std::abs(via - here) <= 1e-9 * (1.0 + here)) return true;
    }
    return false;
  }

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row * w_->cols + c.col); }

  const WorldSpec* w_;
  Cell goal_;
  std::vector<double> dist_;
};

inline Cell cell_of(const WorldSpec& w, double x, double y) {
  const auto c = w.cell_at(x, y);
  if (!c || w.is_blocked(*c)) throw std::domain_error("point is not in free space");
  return *c;
}

/// Corridor-graph distance between the cells containing two points.
inline double shortest_path_distance(const WorldSpec& w, world::Vec2 from, world::Vec2 to) {
  const Cell a = cell_of(w, from.x, from.y);
  const Cell b = cell_of(w, to.x, to.y);
  const double d = DistanceField(w, b).at(a);
  if (d == kUnreachable) throw NoPath("no path between the given points");
  return d;
}

}  // namespace hapnav::eval

#endif  // HAPNAV_EVAL_PATH_HPP
