#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mera/grid.hpp"

namespace mera {

enum class CellKind : std::uint8_t {
  Floor,
  Wall,
  Stone,
  Corridor,
  DoorClosed,
  DoorOpen,
  DoorLocked,
  StairsDown,
  StairsUp,
  HiddenCorridor,
  HiddenDoor,
};

inline constexpr int kCellKindCount = 11;

std::string_view cell_kind_name(CellKind k);

/// Walkable in the true map. Closed and locked doors block movement.
constexpr bool passable(CellKind k) {
  switch (k) {
    case CellKind::Floor:
    case CellKind::Corridor:
    case CellKind::DoorOpen:
    case CellKind::StairsDown:
    case CellKind::StairsUp:
      return true;
    default:
      return false;
  }
}

/// Connectivity notion used by the generator: every door and hidden passage
/// counts as open.
constexpr bool connective(CellKind k) {
  return passable(k) || k == CellKind::DoorClosed || k == CellKind::DoorLocked ||
         k == CellKind::HiddenCorridor || k == CellKind::HiddenDoor;
}

constexpr bool is_door(CellKind k) {
  return k == CellKind::DoorClosed || k == CellKind::DoorOpen || k == CellKind::DoorLocked;
}

/// What a hidden cell looks like until it is found.
constexpr CellKind apparent_kind(CellKind k) {
  if (k == CellKind::HiddenCorridor) return CellKind::Stone;
  if (k == CellKind::HiddenDoor) return CellKind::Wall;
  return k;
}

/// Static monster data. Agents may consult this table the way a player
/// consults the game's wiki.
struct Species {
  std::string_view name;
  char letter;
  int hp;
  int damage_min;
  int damage_max;
  int hit_percent;
  bool passive;  ///< never initiates attacks
  int passive_damage;  ///< dealt back to an attacker
  int min_depth;
};

std::span<const Species> species_table();
const Species& species(int index);
int species_index(std::string_view name);

struct PetData {
  static constexpr std::string_view kName = "kitten";
  static constexpr char kLetter = 'f';
  static constexpr int kHp = 10;
};

struct Monster {
  int species = 0;
  int hp = 1;
  bool hostile = true;
  bool passive = false;
  friend bool operator==(const Monster&, const Monster&) = default;
};
struct Food {
  friend bool operator==(const Food&, const Food&) = default;
};
struct Gold {
  int amount = 1;
  friend bool operator==(const Gold&, const Gold&) = default;
};
struct Key {
  friend bool operator==(const Key&, const Key&) = default;
};
struct Pet {
  int hp = PetData::kHp;
  friend bool operator==(const Pet&, const Pet&) = default;
};

using EntityKind = std::variant<Monster, Food, Gold, Key, Pet>;

struct Entity {
  int id = 0;
  Cell pos;
  EntityKind kind;

  bool is_monster() const { return std::holds_alternative<Monster>(kind); }
  bool is_pet() const { return std::holds_alternative<Pet>(kind); }
  bool is_item() const { return !is_monster() && !is_pet(); }
  bool is_creature() const { return is_monster() || is_pet(); }
  friend bool operator==(const Entity&, const Entity&) = default;
};

/// Room rectangle including its walls.
struct Room {
  int top = 0, left = 0, bottom = 0, right = 0;

  bool contains(Cell c) const {
    return c.row >= top && c.row <= bottom && c.col >= left && c.col <= right;
  }
  bool interior(Cell c) const {
    return c.row > top && c.row < bottom && c.col > left && c.col < right;
  }
  friend bool operator==(const Room&, const Room&) = default;
};

enum class TaskKind : std::uint8_t { Room5x5, KeyRoomS5, RoomUltimate15x15, FullGameChallenge };

std::string_view task_kind_name(TaskKind k);
std::optional<TaskKind> parse_task_kind(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::FullGameChallenge;
  int levels = 5;  ///< FullGameChallenge only; must be >= 2
  int max_steps = 5000;
  std::uint64_t seed = 0;
  /// FullGameChallenge variant: after reaching the bottom level the agent must
  /// climb back to depth 1.
  bool ascent_objective = false;

  /// Single-room tasks end when the agent steps onto the staircase.
  bool goal_task() const { return kind != TaskKind::FullGameChallenge; }

  static TaskSpec room5x5(std::uint64_t seed, int max_steps = 99) {
    return {TaskKind::Room5x5, 1, max_steps, seed, false};
  }
  static TaskSpec key_room(std::uint64_t seed, int max_steps = 100) {
    return {TaskKind::KeyRoomS5, 1, max_steps, seed, false};
  }
  static TaskSpec room_ultimate(std::uint64_t seed, int max_steps = 300) {
    return {TaskKind::RoomUltimate15x15, 1, max_steps, seed, false};
  }
  static TaskSpec full_game(std::uint64_t seed, int levels = 5, int max_steps = 5000) {
    return {TaskKind::FullGameChallenge, levels, max_steps, seed, false};
  }
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct LevelMap {
  int depth = 1;
  Grid<CellKind> cells;
  std::vector<Room> rooms;
  std::vector<Entity> entities;
  Cell spawn;
  std::optional<Cell> stairs_down;
  std::optional<Cell> stairs_up;

  Extent extent() const { return cells.extent(); }
  /// Indices into `rooms` whose rectangle contains `c`.
  std::vector<int> rooms_at(Cell c) const;
  friend bool operator==(const LevelMap&, const LevelMap&) = default;
};

/// Builds a level. The result depends only on (seed, depth, task kind and
/// levels), never on the task's own seed field. `first_entity_id` lets the
/// environment keep ids unique across the levels of one episode.
LevelMap generate_level(std::uint64_t seed, int depth, const TaskSpec& task, int first_entity_id = 1);

/// Cells reachable from `from` over connective terrain (4- and 8-neighbors).
Grid<bool> connected_region(const Grid<CellKind>& cells, Cell from);

}  // namespace mera
