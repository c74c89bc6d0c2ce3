#pragma once

#include <string>

#include "mera/env.hpp"
#include "mera/level.hpp"

namespace mera::test {

/// A single lit room filling the whole map: walls on the border, floor inside.
inline LevelMap room_level(int rows, int cols, Cell spawn) {
  LevelMap l;
  l.depth = 1;
  l.cells = Grid<CellKind>(rows, cols, CellKind::Wall);
  for (int r = 1; r < rows - 1; ++r) {
    for (int c = 1; c < cols - 1; ++c) l.cells.at(r, c) = CellKind::Floor;
  }
  l.rooms = {Room{0, 0, rows - 1, cols - 1}};
  l.spawn = spawn;
  return l;
}

inline Entity monster(int id, Cell pos, std::string_view name, bool hostile = true) {
  const int s = species_index(name);
  return Entity{id, pos, Monster{s, species(s).hp, hostile, species(s).passive}};
}

inline TaskSpec scenario_task(std::uint64_t seed = 1) { return TaskSpec::full_game(seed); }

}  // namespace mera::test
