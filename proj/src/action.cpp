#include "mera/action.hpp"

#include <array>

namespace mera {

namespace {
constexpr std::array<std::string_view, kActionCount> kNames = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW", "Search", "Eat", "Pray", "Engrave", "Descend",
    "Ascend", "Open", "PickUp", "Wait"};
}

std::optional<Action> move_toward_adjacent(Cell from, Cell to) {
  const Cell d = to - from;
  for (Action a : kMoves) {
    if (move_delta(a) == d) return a;
  }
  return std::nullopt;
}

std::string_view action_name(Action a) { return kNames.at(static_cast<std::size_t>(a)); }

std::optional<Action> parse_action(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Action>(i);
  }
  return std::nullopt;
}

}  // namespace mera
