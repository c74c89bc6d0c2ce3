#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mera/action.hpp"
#include "mera/env.hpp"
#include "mera/grid.hpp"
#include "mera/level.hpp"

namespace mera {

// ---------------------------------------------------------------------------
// Observation keys
// ---------------------------------------------------------------------------

/// Observation fields, in lexicographic order of their names.
enum class ObsKey : std::uint8_t { Blstats, Chars, Glyphs, Language, Message };

inline constexpr std::array<ObsKey, 5> kAllObsKeys = {ObsKey::Blstats, ObsKey::Chars, ObsKey::Glyphs,
                                                      ObsKey::Language, ObsKey::Message};

std::string_view obs_key_name(ObsKey k);
std::optional<ObsKey> parse_obs_key(std::string_view name);

class ObservationKeySet {
 public:
  constexpr ObservationKeySet() = default;
  constexpr ObservationKeySet(std::initializer_list<ObsKey> keys) {
    for (ObsKey k : keys) insert(k);
  }
  /// Every raw observation field (language is derived, not raw).
  static constexpr ObservationKeySet raw() {
    return {ObsKey::Blstats, ObsKey::Chars, ObsKey::Glyphs, ObsKey::Message};
  }
  static constexpr ObservationKeySet from_bits(std::uint8_t bits) {
    ObservationKeySet s;
    s.bits_ = bits & 0x1f;
    return s;
  }
  /// Parses "glyphs,blstats" style lists. Throws InvalidArgument on unknown names.
  static ObservationKeySet parse(std::string_view list);

  constexpr void insert(ObsKey k) { bits_ |= bit(k); }
  constexpr void erase(ObsKey k) { bits_ &= static_cast<std::uint8_t>(~bit(k)); }
  constexpr bool contains(ObsKey k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool contains_all(ObservationKeySet o) const { return (bits_ & o.bits_) == o.bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  std::vector<ObsKey> keys() const;
  std::vector<std::string> names() const;
  std::string to_string() const;  ///< comma separated, lexicographic
  friend constexpr bool operator==(const ObservationKeySet&, const ObservationKeySet&) = default;

 private:
  static constexpr std::uint8_t bit(ObsKey k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Refined state
// ---------------------------------------------------------------------------

enum class EntityClass : std::uint8_t { Monster, Food, Gold, Key, Pet };

/// An entity as seen through the glyph grid.
struct EntityView {
  EntityClass cls = EntityClass::Monster;
  Cell pos;
  int species = -1;  ///< monsters only
  bool hostile = false;
  bool passive = false;

  /// A monster that will attack: hostile and not passive.
  bool threatening() const { return cls == EntityClass::Monster && hostile && !passive; }
  friend bool operator==(const EntityView&, const EntityView&) = default;
};

std::optional<EntityView> entity_from_glyph(Glyph g, Cell pos);

struct ThreatSummary {
  int adjacent_hostiles = 0;
  int strongest_adjacent_hp = 0;
  friend bool operator==(const ThreatSummary&, const ThreatSummary&) = default;
};

/// Accumulated world model built from successive observations.
struct GameState {
  Observation current_obs;
  ObservationKeySet exposed = ObservationKeySet::raw();
  int depth = 0;
  Cell agent;
  Grid<bool> visible;
  Grid<bool> explored;
  Grid<CellKind> known_map;  ///< meaningful where explored
  Grid<bool> visited;
  Grid<int> search_count;
  std::vector<EntityView> entities;  ///< sorted by (row, col)
  std::optional<Action> last_action;
  ThreatSummary threat;
  std::optional<Cell> stairs_down_pos;
  std::optional<Cell> stairs_up_pos;
  std::map<int, Cell> stairs_down_by_depth;
  std::map<int, Cell> stairs_up_by_depth;
  /// Item reported under the agent by the last "You see here" message.
  std::optional<EntityClass> underfoot;
  bool carrying_key = false;

  bool initialized() const { return !explored.empty(); }
  Extent extent() const { return explored.extent(); }
  bool has(ObsKey k) const { return exposed.contains(k); }
  const BlStats& blstats() const { return current_obs.blstats; }
  /// Known kind at c, or nullopt when out of bounds or never seen.
  std::optional<CellKind> known(Cell c) const {
    if (!explored.contains(c) || !explored[c]) return std::nullopt;
    return known_map[c];
  }
  const EntityView* entity_at(Cell c) const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

/// Merges `obs` into `prev`. `action` is the action whose result `obs` is;
/// omit it when re-reading an observation. A change of depth starts fresh
/// grids. Throws DimensionMismatch when sizes differ on the same level.
GameState refine(const GameState& prev, const Observation& obs, std::optional<Action> action = std::nullopt);

/// Visible entity positions of one class, sorted by (row, col).
std::vector<Cell> find_entities(const GameState& state, EntityClass cls);

// ---------------------------------------------------------------------------
// Atomic commands
// ---------------------------------------------------------------------------

enum class AtomicName : std::uint8_t {
  PrayConfirmed,
  EngraveElbereth,
  EatNearest,
  DescendHere,
  AscendHere,
  OpenAdjacentDoor,
};

std::string_view atomic_name(AtomicName n);

/// One environment submission: an action plus its text payload, if any.
struct CommandStep {
  Action action;
  std::string text;
  friend bool operator==(const CommandStep&, const CommandStep&) = default;
};

struct AtomicCommand {
  AtomicName name;
  friend bool operator==(const AtomicCommand&, const AtomicCommand&) = default;
};

std::vector<CommandStep> expand_atomic(AtomicCommand cmd);

}  // namespace mera
