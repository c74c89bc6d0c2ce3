#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mera/action.hpp"
#include "mera/grid.hpp"
#include "mera/level.hpp"
#include "mera/rng.hpp"

namespace mera {

// ---------------------------------------------------------------------------
// Glyphs
// ---------------------------------------------------------------------------

using Glyph = std::int32_t;

namespace glyph {
inline constexpr Glyph kBlank = 0;
inline constexpr Glyph kTerrainBase = 1;  // + CellKind, visible kinds only
inline constexpr Glyph kAgent = 16;
inline constexpr Glyph kFood = 17;
inline constexpr Glyph kGold = 18;
inline constexpr Glyph kKey = 19;
inline constexpr Glyph kPet = 20;
inline constexpr Glyph kMonsterBase = 32;  // + species index

constexpr Glyph terrain(CellKind k) {
  return kTerrainBase + static_cast<Glyph>(apparent_kind(k));
}
constexpr bool is_terrain(Glyph g) {
  return g >= kTerrainBase && g < kTerrainBase + static_cast<Glyph>(CellKind::HiddenCorridor);
}
constexpr CellKind terrain_kind(Glyph g) { return static_cast<CellKind>(g - kTerrainBase); }
constexpr bool is_monster(Glyph g) { return g >= kMonsterBase; }
constexpr int monster_species(Glyph g) { return g - kMonsterBase; }
char display_char(Glyph g);
}  // namespace glyph

// ---------------------------------------------------------------------------
// Observation
// ---------------------------------------------------------------------------

enum class Hunger : std::uint8_t { Satiated, NotHungry, Hungry, Weak, Fainting };

std::string_view hunger_name(Hunger h);

struct BlStats {
  int hp = 0;
  int max_hp = 0;
  Hunger hunger = Hunger::NotHungry;
  int depth = 1;
  int gold = 0;
  int turn = 0;
  int score = 0;
  Cell pos;
  std::optional<int> last_prayer_turn;
  friend bool operator==(const BlStats&, const BlStats&) = default;
};

struct Observation {
  Grid<Glyph> glyphs;
  Grid<char> chars;
  std::string message;
  BlStats blstats;

  Extent extent() const { return glyphs.extent(); }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Display characters for a glyph grid. Walls pick '|' or '-' from their
/// neighbors; every other glyph has a single character.
Grid<char> chars_for(const Grid<Glyph>& glyphs);

/// An all-blank observation of the given size.
Observation blank_observation(Extent extent);

/// Message line, one row per map row, then the status line.
std::string render_ascii(const Observation& obs);

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct ScoreCounters {
  int gold = 0;
  int max_depth = 1;
  int kills = 0;
  int cells_explored = 0;
  friend bool operator==(const ScoreCounters&, const ScoreCounters&) = default;
};

/// gold + 50 per level below the first + 20 per kill + 1 per 10 explored cells.
int compute_score(const ScoreCounters& c);

enum class ScoreEventKind : std::uint8_t { Gold, Depth, Kill, Explore };

/// One increment of a score counter, logged in the order it happened.
struct ScoreEvent {
  int turn = 0;
  ScoreEventKind kind = ScoreEventKind::Gold;
  int amount = 0;
  friend bool operator==(const ScoreEvent&, const ScoreEvent&) = default;
};

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

enum class EndReason : std::uint8_t { Goal, Death, StepLimit, Ascended };

std::string_view end_reason_name(EndReason r);

struct StepInfo {
  std::optional<EndReason> reason;
  friend bool operator==(const StepInfo&, const StepInfo&) = default;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
  friend bool operator==(const StepResult&, const StepResult&) = default;
};

/// Tunable world rules. Defaults are the documented game rules.
struct WorldRules {
  int hunger_interval = 200;
  int prayer_timeout = 900;
  int elbereth_turns = 5;
  int rest_turns_per_hp = 5;
  int monster_sight = 8;
  int search_reveal_numerator = 1;
  int search_reveal_denominator = 3;
  int agent_max_hp = 20;
};

/// Actions accepted for a task. Single-room tasks only allow movement plus
/// Search, Wait, Open and PickUp.
ActionSet task_actions(const TaskSpec& task);

/// Deterministic roguelike simulator. One instance runs one episode at a time
/// and is not thread-safe; distinct instances are independent.
class Env {
 public:
  explicit Env(WorldRules rules = {});

  Observation reset(const TaskSpec& task);
  /// Starts an episode on a hand-built level (tests and custom scenarios).
  Observation reset(const TaskSpec& task, LevelMap level);

  /// Applies one action. `text` is the engraving payload for Engrave.
  StepResult step(Action action, std::string_view text = {});

  bool done() const { return end_.has_value(); }
  std::optional<EndReason> end_reason() const { return end_; }
  const TaskSpec& task() const { return task_; }
  const ActionSet& actions() const { return action_set_; }
  const WorldRules& rules() const { return rules_; }

  const Observation& observation() const { return obs_; }
  const LevelMap& level() const { return levels_.at(depth_); }
  LevelMap& mutable_level() { return levels_.at(depth_); }
  int depth() const { return depth_; }
  Cell agent_pos() const { return pos_; }
  int hp() const { return hp_; }
  int max_hp() const { return max_hp_; }
  bool has_key() const { return has_key_; }
  /// Number of step() calls accepted this episode, including wall bumps.
  int actions_taken() const { return actions_taken_; }
  const ScoreCounters& counters() const { return counters_; }
  const std::vector<ScoreEvent>& score_events() const { return events_; }
  /// Cells currently in view.
  const Grid<bool>& visible() const { return visible_; }

  /// Test hooks for building scenarios.
  void set_hp(int hp);
  void set_hunger(Hunger h);
  void set_turn(int turn);

 private:
  Observation begin_episode();
  LevelMap& current() { return levels_.at(depth_); }
  void enter_level(int depth, bool from_above);
  bool try_move(Action a, std::string& msg, bool& consumed);
  void agent_attack(Entity& target, std::string& msg);
  void monsters_act(std::string& msg);
  void end_of_turn(std::string& msg, Action a);
  void do_search(std::string& msg);
  bool ward_active() const;
  void compute_visibility();
  void add_event(ScoreEventKind kind, int amount);
  Observation build_observation(std::string msg);
  Entity* entity_at(Cell c, bool creatures);
  void remove_entity(int id);

  WorldRules rules_;
  TaskSpec task_;
  ActionSet action_set_;
  Rng rng_{0};
  std::map<int, LevelMap> levels_;
  std::map<int, Grid<bool>> visited_;  // per depth; drives cells_explored
  Grid<bool> visible_;
  int depth_ = 1;
  Cell pos_;
  int hp_ = 0;
  int max_hp_ = 0;
  Hunger hunger_ = Hunger::NotHungry;
  int hunger_clock_ = 0;
  int rest_clock_ = 0;
  int turn_ = 0;
  int actions_taken_ = 0;
  bool has_key_ = false;
  std::optional<int> last_prayer_;
  int next_entity_id_ = 1;
  struct Ward {
    int depth = 0;
    Cell cell;
    int until_turn = -1;
  } ward_;
  ScoreCounters counters_;
  std::vector<ScoreEvent> events_;
  std::optional<EndReason> end_;
  Observation obs_;
};

}  // namespace mera
