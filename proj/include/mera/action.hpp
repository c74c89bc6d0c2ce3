#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mera/grid.hpp"

namespace mera {

/// The fixed action vocabulary: eight compass moves followed by commands.
/// Attacking is a move into a hostile's cell.
enum class Action : std::uint8_t {
  N, NE, E, SE, S, SW, W, NW,
  Search, Eat, Pray, Engrave, Descend, Ascend, Open, PickUp, Wait,
};

inline constexpr int kActionCount = 17;
inline constexpr int kMoveCount = 8;

inline constexpr std::array<Action, kMoveCount> kMoves = {
    Action::N, Action::NE, Action::E, Action::SE, Action::S, Action::SW, Action::W, Action::NW};

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::N,      Action::NE,  Action::E,    Action::SE,      Action::S,      Action::SW,
    Action::W,      Action::NW,  Action::Search, Action::Eat,   Action::Pray,   Action::Engrave,
    Action::Descend, Action::Ascend, Action::Open, Action::PickUp, Action::Wait};

constexpr bool is_move(Action a) { return static_cast<int>(a) < kMoveCount; }

/// Row/col offset of a compass move. Undefined for commands.
constexpr Cell move_delta(Action a) {
  constexpr std::array<Cell, kMoveCount> deltas = {
      Cell{-1, 0}, Cell{-1, 1}, Cell{0, 1}, Cell{1, 1}, Cell{1, 0}, Cell{1, -1}, Cell{0, -1}, Cell{-1, -1}};
  return deltas[static_cast<std::size_t>(a)];
}

/// The move that steps from `from` to the 8-adjacent `to`.
std::optional<Action> move_toward_adjacent(Cell from, Cell to);

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view name);

/// Set of actions accepted by an environment instance.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  static ActionSet all() {
    ActionSet s;
    for (Action a : kAllActions) s.insert(a);
    return s;
  }
  static ActionSet of(std::span<const Action> actions) {
    ActionSet s;
    for (Action a : actions) s.insert(a);
    return s;
  }
  void insert(Action a) { bits_ |= bit(a); }
  bool contains(Action a) const { return (bits_ & bit(a)) != 0; }
  friend bool operator==(const ActionSet&, const ActionSet&) = default;

 private:
  static constexpr std::uint32_t bit(Action a) { return 1u << static_cast<unsigned>(a); }
  std::uint32_t bits_ = 0;
};

}  // namespace mera
