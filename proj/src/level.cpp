#include "mera/level.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <stdexcept>
#include <tuple>

#include "mera/action.hpp"
#include "mera/error.hpp"
#include "mera/rng.hpp"

namespace mera {

namespace {

constexpr std::array<Species, 9> kSpecies = {{
    {"newt", ':', 2, 1, 2, 50, false, 0, 1},
    {"jackal", 'd', 4, 1, 2, 60, false, 0, 1},
    {"sewer rat", 'r', 4, 1, 3, 60, false, 0, 1},
    {"lichen", 'F', 6, 0, 0, 0, true, 0, 1},
    {"goblin", 'o', 5, 1, 4, 60, false, 0, 2},
    {"floating eye", 'e', 6, 0, 0, 0, true, 4, 2},
    {"hill orc", 'O', 9, 1, 6, 65, false, 0, 3},
    {"dwarf", 'h', 10, 1, 8, 65, false, 0, 4},
    {"soldier ant", 'a', 12, 2, 8, 70, false, 0, 5},
}};

constexpr int kFullRows = 21;
constexpr int kFullCols = 79;

void carve_room(Grid<CellKind>& cells, const Room& r) {
  for (int row = r.top; row <= r.bottom; ++row) {
    for (int col = r.left; col <= r.right; ++col) {
      const bool border = row == r.top || row == r.bottom || col == r.left || col == r.right;
      cells.at(row, col) = border ? CellKind::Wall : CellKind::Floor;
    }
  }
}

Cell random_interior(Rng& rng, const Room& r) {
  return {rng.between(r.top + 1, r.bottom - 1), rng.between(r.left + 1, r.right - 1)};
}

bool occupied(const LevelMap& level, Cell c) {
  if (c == level.spawn) return true;
  if (level.stairs_down == c || level.stairs_up == c) return true;
  return std::any_of(level.entities.begin(), level.entities.end(),
                     [&](const Entity& e) { return e.pos == c; });
}

/// Free interior cell of a random room, or nullopt after a bounded search.
std::optional<Cell> free_cell(Rng& rng, const LevelMap& level, int min_spawn_distance) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Room& room = level.rooms[static_cast<std::size_t>(rng.below(static_cast<int>(level.rooms.size())))];
    const Cell c = random_interior(rng, room);
    if (level.cells[c] != CellKind::Floor || occupied(level, c)) continue;
    if (chebyshev(c, level.spawn) < min_spawn_distance) continue;
    return c;
  }
  return std::nullopt;
}

int random_species(Rng& rng, int depth, bool allow_passive) {
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(kSpecies.size()); ++i) {
    if (kSpecies[i].min_depth <= depth && (allow_passive || !kSpecies[i].passive)) pool.push_back(i);
  }
  return pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
}

Entity make_monster(int id, Cell pos, int species_idx) {
  const Species& s = kSpecies[static_cast<std::size_t>(species_idx)];
  return Entity{id, pos, Monster{species_idx, s.hp, true, s.passive}};
}

class Builder {
 public:
  Builder(std::uint64_t seed, int depth, const TaskSpec& task, int first_id)
      : rng_(seed), depth_(depth), task_(task), next_id_(first_id) {}

  LevelMap build() {
    switch (task_.kind) {
      case TaskKind::Room5x5: return single_room(5, 0);
      case TaskKind::RoomUltimate15x15: return single_room(15, 3);
      case TaskKind::KeyRoomS5: return key_room();
      case TaskKind::FullGameChallenge: return dungeon();
    }
    throw std::logic_error("unknown task kind");
  }

 private:
  LevelMap single_room(int size, int monsters) {
    LevelMap level;
    level.depth = depth_;
    level.cells = Grid<CellKind>(size + 2, size + 2, CellKind::Stone);
    const Room room{0, 0, size + 1, size + 1};
    carve_room(level.cells, room);
    level.rooms.push_back(room);
    level.spawn = random_interior(rng_, room);
    Cell goal = level.spawn;
    while (goal == level.spawn || (monsters > 0 && chebyshev(goal, level.spawn) < size / 3)) {
      goal = random_interior(rng_, room);
    }
    level.cells[goal] = CellKind::StairsDown;
    level.stairs_down = goal;
    for (int i = 0; i < monsters; ++i) {
      if (auto c = free_cell(rng_, level, 4)) {
        level.entities.push_back(make_monster(next_id_++, *c, random_species(rng_, 2, false)));
      }
    }
    return level;
  }

  LevelMap key_room() {
    LevelMap level;
    level.depth = depth_;
    level.cells = Grid<CellKind>(7, 11, CellKind::Stone);
    const Room main{0, 0, 6, 6};
    const Room vault{0, 6, 6, 10};
    carve_room(level.cells, main);
    carve_room(level.cells, vault);
    level.rooms = {main, vault};
    const Cell door{rng_.between(1, 5), 6};
    level.cells[door] = CellKind::DoorLocked;
    level.spawn = random_interior(rng_, main);
    const Cell goal = random_interior(rng_, vault);
    level.cells[goal] = CellKind::StairsDown;
    level.stairs_down = goal;
    Cell key = level.spawn;
    while (key == level.spawn) key = random_interior(rng_, main);
    level.entities.push_back(Entity{next_id_++, key, Key{}});
    return level;
  }

  LevelMap dungeon() {
    LevelMap level;
    level.depth = depth_;
    level.cells = Grid<CellKind>(kFullRows, kFullCols, CellKind::Stone);
    place_rooms(level);
    connect_rooms(level);
    place_features(level);
    return level;
  }

  void place_rooms(LevelMap& level) {
    for (int attempt = 0; attempt < 300 && level.rooms.size() < 9; ++attempt) {
      const int h = rng_.between(2, 5);
      const int w = rng_.between(3, 12);
      const int top = rng_.between(0, kFullRows - h - 2);
      const int left = rng_.between(0, kFullCols - w - 2);
      const Room r{top, left, top + h + 1, left + w + 1};
      const bool clear = std::none_of(level.rooms.begin(), level.rooms.end(), [&](const Room& o) {
        return r.left <= o.right + 3 && o.left <= r.right + 3 && r.top <= o.bottom + 2 &&
               o.top <= r.bottom + 2;
      });
      if (clear) level.rooms.push_back(r);
    }
    std::sort(level.rooms.begin(), level.rooms.end(), [](const Room& a, const Room& b) {
      return std::tie(a.left, a.top) < std::tie(b.left, b.top);
    });
    for (const Room& r : level.rooms) carve_room(level.cells, r);
  }

  struct DoorSite {
    Cell door;
    Cell outside;
  };

  DoorSite door_on(const Room& r, int side) {
    // side: 0 top, 1 right, 2 bottom, 3 left
    switch (side) {
      case 0: {
        const Cell d{r.top, rng_.between(r.left + 1, r.right - 1)};
        return {d, d + Cell{-1, 0}};
      }
      case 1: {
        const Cell d{rng_.between(r.top + 1, r.bottom - 1), r.right};
        return {d, d + Cell{0, 1}};
      }
      case 2: {
        const Cell d{r.bottom, rng_.between(r.left + 1, r.right - 1)};
        return {d, d + Cell{1, 0}};
      }
      default: {
        const Cell d{rng_.between(r.top + 1, r.bottom - 1), r.left};
        return {d, d + Cell{0, -1}};
      }
    }
  }

  bool in_any_room(const LevelMap& level, Cell c) const {
    return std::any_of(level.rooms.begin(), level.rooms.end(),
                       [&](const Room& r) { return r.contains(c); });
  }

  std::vector<Cell> corridor_path(const LevelMap& level, Cell from, Cell to) const {
    const Extent e = level.extent();
    if (!e.contains(from) || !e.contains(to) || in_any_room(level, from) || in_any_room(level, to)) {
      return {};
    }
    Grid<int> parent(e, -1);
    std::deque<Cell> queue{from};
    parent[from] = static_cast<int>(parent.index(from));
    constexpr std::array<Cell, 4> steps = {Cell{0, 1}, Cell{0, -1}, Cell{1, 0}, Cell{-1, 0}};
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      if (c == to) break;
      for (Cell d : steps) {
        const Cell n = c + d;
        if (!e.contains(n) || parent[n] != -1 || in_any_room(level, n)) continue;
        parent[n] = static_cast<int>(parent.index(c));
        queue.push_back(n);
      }
    }
    if (parent[to] == -1) return {};
    std::vector<Cell> path;
    for (Cell c = to;; c = parent.cell_of(static_cast<std::size_t>(parent[c]))) {
      path.push_back(c);
      if (c == from) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  CellKind roll_door() {
    if (rng_.chance(1, 14)) return CellKind::HiddenDoor;
    return rng_.chance(1, 2) ? CellKind::DoorOpen : CellKind::DoorClosed;
  }

  bool connect(LevelMap& level, const Room& a, const Room& b) {
    int side_a;
    int side_b;
    if (b.left > a.right) {
      side_a = 1, side_b = 3;
    } else if (b.top > a.bottom) {
      side_a = 2, side_b = 0;
    } else {
      side_a = 0, side_b = 2;
    }
    for (int attempt = 0; attempt < 6; ++attempt) {
      const DoorSite da = door_on(a, side_a);
      const DoorSite db = door_on(b, side_b);
      auto path = corridor_path(level, da.outside, db.outside);
      if (path.empty()) continue;
      for (Cell c : path) {
        if (level.cells[c] == CellKind::Stone) level.cells[c] = CellKind::Corridor;
      }
      if (path.size() >= 6 && rng_.chance(1, 12)) {
        level.cells[path[path.size() / 2]] = CellKind::HiddenCorridor;
      }
      for (Cell d : {da.door, db.door}) {
        if (!is_door(level.cells[d]) && level.cells[d] != CellKind::HiddenDoor) level.cells[d] = roll_door();
      }
      return true;
    }
    return false;
  }

  void connect_rooms(LevelMap& level) {
    const auto n = level.rooms.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!connect(level, level.rooms[i], level.rooms[i + 1]) && i + 2 < n) {
        connect(level, level.rooms[i], level.rooms[i + 2]);
      }
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
      if (rng_.chance(1, 4)) connect(level, level.rooms[i], level.rooms[i + 2]);
    }
  }

  void place_features(LevelMap& level) {
    const int room_count = static_cast<int>(level.rooms.size());
    const int spawn_room = rng_.below(room_count);
    level.spawn = random_interior(rng_, level.rooms[static_cast<std::size_t>(spawn_room)]);
    if (depth_ > 1) {
      level.cells[level.spawn] = CellKind::StairsUp;
      level.stairs_up = level.spawn;
    }
    if (depth_ < task_.levels) {
      int down_room = spawn_room;
      while (room_count > 1 && down_room == spawn_room) down_room = rng_.below(room_count);
      Cell down = level.spawn;
      while (down == level.spawn) down = random_interior(rng_, level.rooms[static_cast<std::size_t>(down_room)]);
      level.cells[down] = CellKind::StairsDown;
      level.stairs_down = down;
    }
    const int gold_piles = rng_.between(1, 3);
    for (int i = 0; i < gold_piles; ++i) {
      if (auto c = free_cell(rng_, level, 0)) {
        level.entities.push_back(Entity{next_id_++, *c, Gold{rng_.between(5, 15 + 10 * depth_)}});
      }
    }
    const int food = rng_.between(1, 2);
    for (int i = 0; i < food; ++i) {
      if (auto c = free_cell(rng_, level, 0)) level.entities.push_back(Entity{next_id_++, *c, Food{}});
    }
    const int monsters = rng_.between(depth_, depth_ + 2);
    for (int i = 0; i < monsters; ++i) {
      if (auto c = free_cell(rng_, level, 4)) {
        level.entities.push_back(make_monster(next_id_++, *c, random_species(rng_, depth_, true)));
      }
    }
    if (depth_ == 1) {
      for (Action a : {Action::E, Action::W, Action::S, Action::N, Action::SE, Action::NW, Action::NE, Action::SW}) {
        const Cell c = level.spawn + move_delta(a);
        if (level.cells.contains(c) && level.cells[c] == CellKind::Floor && !occupied(level, c)) {
          level.entities.push_back(Entity{next_id_++, c, Pet{}});
          break;
        }
      }
    }
  }

  Rng rng_;
  int depth_;
  TaskSpec task_;
  int next_id_;
};

bool fully_connected(const LevelMap& level) {
  const Grid<bool> region = connected_region(level.cells, level.spawn);
  for (const Room& r : level.rooms) {
    if (!region[Cell{r.top + 1, r.left + 1}]) return false;
  }
  if (level.stairs_down && !region[*level.stairs_down]) return false;
  if (level.stairs_up && !region[*level.stairs_up]) return false;
  return std::all_of(level.entities.begin(), level.entities.end(),
                     [&](const Entity& e) { return region[e.pos]; });
}

}  // namespace

std::string_view cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::Floor: return "floor";
    case CellKind::Wall: return "wall";
    case CellKind::Stone: return "stone";
    case CellKind::Corridor: return "corridor";
    case CellKind::DoorClosed: return "closed door";
    case CellKind::DoorOpen: return "open door";
    case CellKind::DoorLocked: return "locked door";
    case CellKind::StairsDown: return "staircase down";
    case CellKind::StairsUp: return "staircase up";
    case CellKind::HiddenCorridor: return "hidden corridor";
    case CellKind::HiddenDoor: return "hidden door";
  }
  return "?";
}

std::span<const Species> species_table() { return kSpecies; }

const Species& species(int index) { return kSpecies.at(static_cast<std::size_t>(index)); }

int species_index(std::string_view name) {
  for (std::size_t i = 0; i < kSpecies.size(); ++i) {
    if (kSpecies[i].name == name) return static_cast<int>(i);
  }
  throw InvalidArgument("unknown species: " + std::string(name));
}

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Room5x5: return "Room5x5";
    case TaskKind::KeyRoomS5: return "KeyRoomS5";
    case TaskKind::RoomUltimate15x15: return "RoomUltimate15x15";
    case TaskKind::FullGameChallenge: return "FullGameChallenge";
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  for (TaskKind k : {TaskKind::Room5x5, TaskKind::KeyRoomS5, TaskKind::RoomUltimate15x15,
                     TaskKind::FullGameChallenge}) {
    if (task_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<int> LevelMap::rooms_at(Cell c) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    if (rooms[i].contains(c)) out.push_back(static_cast<int>(i));
  }
  return out;
}

Grid<bool> connected_region(const Grid<CellKind>& cells, Cell from) {
  Grid<bool> seen(cells.extent(), false);
  if (!cells.contains(from) || !connective(cells[from])) return seen;
  std::deque<Cell> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if (!cells.contains(n) || seen[n] || !connective(cells[n])) continue;
        seen[n] = true;
        queue.push_back(n);
      }
    }
  }
  return seen;
}

LevelMap generate_level(std::uint64_t seed, int depth, const TaskSpec& task, int first_entity_id) {
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  if (task.kind == TaskKind::FullGameChallenge && task.levels < 2) {
    throw InvalidArgument("FullGameChallenge needs at least 2 levels");
  }
  const std::uint64_t base = mix_seed(seed, static_cast<std::uint64_t>(depth) * 1000003ULL +
                                                static_cast<std::uint64_t>(task.kind));
  for (std::uint64_t attempt = 0;; ++attempt) {
    Builder builder(mix_seed(base, attempt), depth, task, first_entity_id);
    LevelMap level = builder.build();
    if (level.rooms.size() >= (task.kind == TaskKind::FullGameChallenge ? 3u : 1u) && fully_connected(level)) {
      return level;
    }
  }
}

}  // namespace mera
