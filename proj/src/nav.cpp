#include "mera/nav.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "mera/error.hpp"

namespace mera {

namespace {

PathCost add_step(PathCost c, Action a) {
  const Cell d = move_delta(a);
  if (d.row != 0 && d.col != 0) {
    ++c.diagonal;
  } else {
    ++c.straight;
  }
  return c;
}

}  // namespace

double octile(Cell a, Cell b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return std::max(dr, dc) - std::min(dr, dc) + std::min(dr, dc) * kSqrt2;
}

double heuristic(Cell a, Cell b, Metric m) {
  return m == Metric::Octile ? octile(a, b) : static_cast<double>(chebyshev(a, b));
}

std::optional<Path> astar(Extent extent, const Walkable& walkable, Cell start, Cell goal, Metric metric) {
  if (!extent.contains(start) || !walkable(start)) throw InvalidStart("start cell is not walkable");
  if (!extent.contains(goal) || !walkable(goal)) return std::nullopt;

  Grid<PathCost> best(extent);
  Grid<double> g(extent, -1.0);
  Grid<int> parent(extent, -1);
  Grid<bool> closed(extent, false);

  // (f, -g, cell): smallest f, then largest g, then smallest (row, col).
  using Node = std::tuple<double, double, Cell>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  g[start] = 0.0;
  open.emplace(heuristic(start, goal, metric), -0.0, start);

  while (!open.empty()) {
    const auto [f, neg_g, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = true;
    if (cur == goal) {
      Path p;
      p.steps = best[goal];
      p.cost = g[goal];
      for (int i = static_cast<int>(g.index(goal)); i >= 0; i = parent.data()[i]) {
        p.cells.push_back(g.cell_of(static_cast<std::size_t>(i)));
      }
      std::reverse(p.cells.begin(), p.cells.end());
      return p;
    }
    for (Action a : kMoves) {
      const Cell next = cur + move_delta(a);
      if (!extent.contains(next) || closed[next] || !walkable(next)) continue;
      const PathCost steps = add_step(best[cur], a);
      const double ng = steps.value(metric);
      if (g[next] >= 0.0 && ng >= g[next]) continue;
      g[next] = ng;
      best[next] = steps;
      parent[next] = static_cast<int>(g.index(cur));
      open.emplace(ng + heuristic(next, goal, metric), -ng, next);
    }
  }
  return std::nullopt;
}

DistanceMap::DistanceMap(Extent extent, const Walkable& walkable, Cell start, Metric metric)
    : extent_(extent),
      start_(start),
      metric_(metric),
      reached_(extent, false),
      cost_(extent, -1.0),
      steps_(extent),
      parent_(extent, -1) {
  if (!extent.contains(start) || !walkable(start)) throw InvalidStart("start cell is not walkable");
  Grid<bool> tested(extent, false);
  Grid<bool> ok(extent, false);
  auto can_walk = [&](Cell c) {
    if (!tested[c]) {
      tested[c] = true;
      ok[c] = walkable(c);
    }
    return static_cast<bool>(ok[c]);
  };

  using Node = std::tuple<double, Cell>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  cost_[start] = 0.0;
  open.emplace(0.0, start);
  while (!open.empty()) {
    const auto [d, cur] = open.top();
    open.pop();
    if (reached_[cur]) continue;
    reached_[cur] = true;
    for (Action a : kMoves) {
      const Cell next = cur + move_delta(a);
      if (!extent.contains(next) || reached_[next] || !can_walk(next)) continue;
      const PathCost steps = add_step(steps_[cur], a);
      const double nd = steps.value(metric);
      if (cost_[next] >= 0.0 && nd >= cost_[next]) continue;
      cost_[next] = nd;
      steps_[next] = steps;
      parent_[next] = static_cast<int>(cost_.index(cur));
      open.emplace(nd, next);
    }
  }
}

std::optional<Path> DistanceMap::path_to(Cell c) const {
  if (!reachable(c)) return std::nullopt;
  Path p;
  p.steps = steps_[c];
  p.cost = cost_[c];
  for (int i = static_cast<int>(cost_.index(c)); i >= 0; i = parent_.data()[i]) {
    p.cells.push_back(cost_.cell_of(static_cast<std::size_t>(i)));
  }
  std::reverse(p.cells.begin(), p.cells.end());
  return p;
}

bool planning_walkable(const GameState& state, Cell c) {
  const auto k = state.known(c);
  if (!k) return false;
  switch (*k) {
    case CellKind::Floor:
    case CellKind::Corridor:
    case CellKind::DoorOpen:
    case CellKind::DoorClosed:
    case CellKind::StairsDown:
    case CellKind::StairsUp:
      return true;
    default:
      return false;
  }
}

Walkable planning_walkable(const GameState& state) {
  return [&state](Cell c) { return planning_walkable(state, c); };
}

std::vector<Cell> frontier_targets(const GameState& state) {
  std::vector<Cell> out;
  if (!state.initialized()) return out;
  const Extent ext = state.extent();
  for (int r = 0; r < ext.rows; ++r) {
    for (int c = 0; c < ext.cols; ++c) {
      const Cell cell{r, c};
      if (!planning_walkable(state, cell) || state.known_map[cell] == CellKind::DoorClosed) continue;
      for (Action a : kMoves) {
        const Cell n = cell + move_delta(a);
        if (ext.contains(n) && !state.explored[n]) {
          out.push_back(cell);
          break;
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](Cell a, Cell b) {
    return octile(state.agent, a) < octile(state.agent, b);
  });
  return out;
}

std::optional<Target> closest_reachable(const DistanceMap& dist, std::span<const Cell> targets) {
  std::optional<Cell> best;
  for (Cell t : targets) {
    if (!dist.reachable(t)) continue;
    if (!best || dist.cost(t) < dist.cost(*best) || (dist.cost(t) == dist.cost(*best) && t < *best)) best = t;
  }
  if (!best) return std::nullopt;
  return Target{*best, *dist.path_to(*best)};
}

std::optional<Target> closest_reachable(const GameState& state, std::span<const Cell> targets, Metric metric) {
  if (targets.empty() || !planning_walkable(state, state.agent)) return std::nullopt;
  const DistanceMap dist(state.extent(), planning_walkable(state), state.agent, metric);
  return closest_reachable(dist, targets);
}

std::optional<Target> farthest_reachable(const GameState& state, std::span<const Cell> targets, Metric metric) {
  if (targets.empty() || !planning_walkable(state, state.agent)) return std::nullopt;
  const DistanceMap dist(state.extent(), planning_walkable(state), state.agent, metric);
  std::optional<Cell> best;
  for (Cell t : targets) {
    if (!dist.reachable(t)) continue;
    if (!best || dist.cost(t) > dist.cost(*best) || (dist.cost(t) == dist.cost(*best) && t < *best)) best = t;
  }
  if (!best) return std::nullopt;
  return Target{*best, *dist.path_to(*best)};
}

}  // namespace mera
