#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mera/grid.hpp"
#include "mera/state.hpp"

namespace mera {

inline constexpr double kSqrt2 = 1.4142135623730951;

/// Step metric. Octile charges sqrt(2) per diagonal step, Turn charges one
/// per step (every move takes one game turn).
enum class Metric : std::uint8_t { Octile, Turn };

/// Path cost as step counts, so equal paths compare exactly.
struct PathCost {
  int straight = 0;
  int diagonal = 0;

  double value(Metric m = Metric::Octile) const {
    return m == Metric::Octile ? straight + diagonal * kSqrt2 : static_cast<double>(straight + diagonal);
  }
  friend bool operator==(const PathCost&, const PathCost&) = default;
};

struct Path {
  std::vector<Cell> cells;  ///< start first, goal last
  PathCost steps;
  double cost = 0.0;

  std::size_t length() const { return cells.empty() ? 0 : cells.size() - 1; }
};

double octile(Cell a, Cell b);
double heuristic(Cell a, Cell b, Metric m);

using Walkable = std::function<bool(Cell)>;

/// Shortest 8-connected path. Throws InvalidStart when the start is not
/// walkable. Ties on f prefer larger g, then the smaller (row, col).
std::optional<Path> astar(Extent extent, const Walkable& walkable, Cell start, Cell goal,
                          Metric metric = Metric::Octile);

/// Single-source shortest paths over walkable cells.
class DistanceMap {
 public:
  DistanceMap(Extent extent, const Walkable& walkable, Cell start, Metric metric = Metric::Octile);

  Cell start() const { return start_; }
  bool reachable(Cell c) const { return extent_.contains(c) && reached_[c]; }
  /// Cost to c; c must be reachable.
  double cost(Cell c) const { return cost_[c]; }
  std::optional<Path> path_to(Cell c) const;

 private:
  Extent extent_;
  Cell start_;
  Metric metric_;
  Grid<bool> reached_;
  Grid<double> cost_;
  Grid<PathCost> steps_;
  Grid<int> parent_;  // index into the grid, -1 at the root
};

/// Walkable for planning: known floor, corridor, open or closed door, or
/// stairs. Unknown cells, walls, stone and locked doors are not.
bool planning_walkable(const GameState& state, Cell c);
Walkable planning_walkable(const GameState& state);

/// Known walkable cells other than closed doors with at least one unexplored
/// in-bounds neighbour,
/// sorted by octile distance from the agent, then (row, col).
std::vector<Cell> frontier_targets(const GameState& state);

struct Target {
  Cell cell;
  Path path;
};

/// The target with the smallest path cost from the agent; ties by (row, col).
std::optional<Target> closest_reachable(const GameState& state, std::span<const Cell> targets,
                                        Metric metric = Metric::Octile);
std::optional<Target> closest_reachable(const DistanceMap& dist, std::span<const Cell> targets);

/// The reachable target with the largest path cost; ties by (row, col).
std::optional<Target> farthest_reachable(const GameState& state, std::span<const Cell> targets,
                                         Metric metric = Metric::Octile);

}  // namespace mera
