#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mera/env.hpp"
#include "mera/nav.hpp"
#include "mera/rng.hpp"
#include "mera/state.hpp"

namespace mera {

/// Thresholds the built-in skills consult.
struct SkillParams {
  int pray_hp_divisor = 3;         ///< pray when hp * divisor < max_hp
  int prayer_timeout = 900;        ///< turns between prayers
  int elbereth_min_adjacent = 2;   ///< adjacent hostiles that trigger a ward
  int run_radius = 3;              ///< flee when a hostile is this close...
  int run_hp_divisor = 2;          ///< ...and hp * divisor < max_hp
  double rest_hp_fraction = 0.6;   ///< rest below this share of max hp
  int search_cap = 12;             ///< searches per wall or dead end
  int max_plan_actions = 200;      ///< action budget per skill execution
  double safety_hp_drop = 0.3;     ///< interrupt after losing this share of hp
  int fallback_searches = 10;      ///< searches before a random fallback move
  int fallback_limit = 50;         ///< consecutive fallbacks before giving up

  friend bool operator==(const SkillParams&, const SkillParams&) = default;
};

/// Read-only inputs to planning besides the state.
struct PlanContext {
  SkillParams params;
  ActionSet legal = ActionSet::all();
  bool ascent_active = false;
  Metric metric = Metric::Octile;
};

using PlanPayload = std::variant<std::monostate, Action, AtomicCommand>;

/// What a skill intends to do: an optional target and path, then a payload
/// to submit on arrival.
struct Plan {
  std::string skill;
  std::optional<Cell> target;
  std::optional<Path> path;
  PlanPayload payload;
};

enum class OutcomeStatus : std::uint8_t { Completed, Interrupted, Failed };

std::string_view outcome_name(OutcomeStatus s);

struct Outcome {
  OutcomeStatus status = OutcomeStatus::Completed;
  int actions = 0;
};

/// Why an episode stopped. Failed means the agent ran out of options.
enum class EpisodeEnd : std::uint8_t { Goal, Death, StepLimit, Ascended, Failed };

std::string_view episode_end_name(EpisodeEnd e);

/// Called after every environment step the agent makes.
struct StepEvent {
  const GameState& before;
  Action action;
  std::string_view text;
  const StepResult& result;
  const GameState& after;
  std::string_view skill;  ///< empty for fallback actions
};

using StepHook = std::function<void(const StepEvent&)>;

/// The agent's view of a running episode while a skill executes. Tracks
/// the per-execution budget and the safety interrupt.
class EpisodeHandle {
 public:
  EpisodeHandle(Env& env, GameState& state, Rng& rng, const PlanContext& ctx, int max_steps,
                const StepHook* hook = nullptr);

  const GameState& state() const { return state_; }
  const PlanContext& context() const { return ctx_; }
  Rng& rng() { return rng_; }
  const ActionSet& legal() const { return ctx_.legal; }

  /// Starts a new execution: resets the budget and safety baselines.
  void begin(std::string_view skill);

  /// Submits one action. Returns true when the caller may keep acting.
  bool act(Action a, std::string_view text = {});

  bool episode_done() const;
  bool interrupted() const { return interrupted_; }
  bool budget_left() const;
  int actions() const { return actions_; }

  /// Outcome for the current execution with the given nominal status;
  /// an interrupt overrides Completed.
  Outcome finish(OutcomeStatus status) const;

 private:
  Env& env_;
  GameState& state_;
  Rng& rng_;
  const PlanContext& ctx_;
  int max_steps_;
  const StepHook* hook_;
  std::string skill_;
  int actions_ = 0;
  int start_hp_ = 0;
  int start_adjacent_ = 0;
  bool interrupted_ = false;
};

/// A reusable behaviour: decides whether it applies and how to carry it out.
class Skill {
 public:
  virtual ~Skill() = default;
  virtual std::string_view name() const = 0;
  /// Observation fields the skill reads.
  virtual ObservationKeySet required_keys() const { return {ObsKey::Glyphs}; }
  /// Pure: no side effects, no randomness.
  virtual std::optional<Plan> plan(const GameState& state, const PlanContext& ctx) const = 0;
  virtual Outcome execute(const Plan& plan, EpisodeHandle& handle) const = 0;
};

class SkillRegistry {
 public:
  /// Throws DuplicateName when the name is taken.
  void register_skill(std::shared_ptr<const Skill> skill);
  /// Throws UnknownSkill.
  const Skill& resolve(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const Skill>, std::less<>> skills_;
};

using PriorityList = std::vector<std::string>;

/// Throws UnknownSkill or DuplicateName.
void validate_priorities(const PriorityList& list, const SkillRegistry& registry);

struct PlannedSkill {
  const Skill* skill = nullptr;
  Plan plan;
};

/// First skill in priority order that produces a plan. Skills whose
/// required keys are not exposed are skipped.
std::optional<PlannedSkill> plan_next(const GameState& state, const PriorityList& priorities,
                                      const SkillRegistry& registry, const PlanContext& ctx);

struct EpisodeStats {
  std::uint64_t seed = 0;
  int score = 0;
  int turns = 0;
  int actions = 0;
  int max_depth = 1;
  EpisodeEnd end = EpisodeEnd::StepLimit;
  std::map<std::string, int> invocations;
  int fallback_actions = 0;
};

struct AgentConfig {
  PriorityList priorities;
  SkillParams params;
  ObservationKeySet exposed = ObservationKeySet::raw();
  Metric metric = Metric::Octile;
  StepHook on_step;
};

/// Plays one episode on an already reset environment.
EpisodeStats run_episode(Env& env, const Observation& first, const SkillRegistry& registry,
                         const AgentConfig& config, int max_steps);

/// Resets a fresh environment for `task` and plays it to the end.
EpisodeStats run_episode(const TaskSpec& task, const SkillRegistry& registry, const AgentConfig& config,
                         int max_steps);

/// Moves whose target is a known walkable cell or a visible creature.
std::vector<Action> legal_moves(const GameState& state, const ActionSet& legal);

}  // namespace mera
