#include "mera/agent.hpp"

#include <set>

#include "mera/error.hpp"

namespace mera {

std::string_view outcome_name(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::Completed: return "completed";
    case OutcomeStatus::Interrupted: return "interrupted";
    case OutcomeStatus::Failed: return "failed";
  }
  return "?";
}

std::string_view episode_end_name(EpisodeEnd e) {
  switch (e) {
    case EpisodeEnd::Goal: return "goal";
    case EpisodeEnd::Death: return "death";
    case EpisodeEnd::StepLimit: return "step_limit";
    case EpisodeEnd::Ascended: return "ascended";
    case EpisodeEnd::Failed: return "failed";
  }
  return "?";
}

EpisodeHandle::EpisodeHandle(Env& env, GameState& state, Rng& rng, const PlanContext& ctx, int max_steps,
                             const StepHook* hook)
    : env_(env), state_(state), rng_(rng), ctx_(ctx), max_steps_(max_steps), hook_(hook) {}

void EpisodeHandle::begin(std::string_view skill) {
  skill_ = skill;
  actions_ = 0;
  interrupted_ = false;
  start_hp_ = state_.blstats().hp;
  start_adjacent_ = state_.threat.adjacent_hostiles;
}

bool EpisodeHandle::episode_done() const { return env_.done() || env_.actions_taken() >= max_steps_; }

bool EpisodeHandle::budget_left() const { return actions_ < ctx_.params.max_plan_actions; }

bool EpisodeHandle::act(Action a, std::string_view text) {
  if (episode_done() || !budget_left()) return false;
  const StepResult result = env_.step(a, text);
  ++actions_;
  if (hook_ && *hook_) {
    const GameState before = state_;
    state_ = refine(state_, result.observation, a);
    (*hook_)(StepEvent{before, a, text, result, state_, skill_});
  } else {
    state_ = refine(state_, result.observation, a);
  }
  const int adjacent = state_.threat.adjacent_hostiles;
  if (adjacent > start_adjacent_) interrupted_ = true;
  start_adjacent_ = adjacent;
  const int hp = state_.blstats().hp;
  if (start_hp_ - hp > ctx_.params.safety_hp_drop * start_hp_) interrupted_ = true;
  return !episode_done() && !interrupted_ && budget_left();
}

Outcome EpisodeHandle::finish(OutcomeStatus status) const {
  if (interrupted_ && status == OutcomeStatus::Completed) status = OutcomeStatus::Interrupted;
  return Outcome{status, actions_};
}

void SkillRegistry::register_skill(std::shared_ptr<const Skill> skill) {
  if (!skill) throw InvalidArgument("null skill");
  std::string name(skill->name());
  if (skills_.contains(name)) throw DuplicateName("skill already registered: " + name);
  skills_.emplace(std::move(name), std::move(skill));
}

const Skill& SkillRegistry::resolve(std::string_view name) const {
  auto it = skills_.find(name);
  if (it == skills_.end()) throw UnknownSkill("unknown skill: " + std::string(name));
  return *it->second;
}

bool SkillRegistry::contains(std::string_view name) const { return skills_.find(name) != skills_.end(); }

std::vector<std::string> SkillRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : skills_) out.push_back(name);
  return out;
}

void validate_priorities(const PriorityList& list, const SkillRegistry& registry) {
  std::set<std::string, std::less<>> seen;
  for (const auto& name : list) {
    registry.resolve(name);
    if (!seen.insert(name).second) throw DuplicateName("skill listed twice: " + name);
  }
}

std::optional<PlannedSkill> plan_next(const GameState& state, const PriorityList& priorities,
                                      const SkillRegistry& registry, const PlanContext& ctx) {
  for (const auto& name : priorities) {
    const Skill& skill = registry.resolve(name);
    if (!state.exposed.contains_all(skill.required_keys())) continue;
    if (auto plan = skill.plan(state, ctx)) {
      plan->skill = name;
      return PlannedSkill{&skill, std::move(*plan)};
    }
  }
  return std::nullopt;
}

std::vector<Action> legal_moves(const GameState& state, const ActionSet& legal) {
  std::vector<Action> out;
  for (Action a : kMoves) {
    if (!legal.contains(a)) continue;
    const Cell c = state.agent + move_delta(a);
    const EntityView* e = state.entity_at(c);
    const bool creature = e && (e->cls == EntityClass::Monster || e->cls == EntityClass::Pet);
    if (creature || planning_walkable(state, c)) out.push_back(a);
  }
  return out;
}

EpisodeStats run_episode(Env& env, const Observation& first, const SkillRegistry& registry,
                         const AgentConfig& config, int max_steps) {
  if (max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
  validate_priorities(config.priorities, registry);
  GameState state;
  state.exposed = config.exposed;
  state = refine(state, first);

  EpisodeStats stats;
  stats.seed = env.task().seed;
  Rng rng(mix_seed(env.task().seed, 0xA6E7));
  PlanContext ctx{config.params, env.actions(), false, config.metric};
  const StepHook* hook = config.on_step ? &config.on_step : nullptr;
  EpisodeHandle handle(env, state, rng, ctx, max_steps, hook);

  int max_depth = std::max(1, env.observation().blstats.depth);
  int streak = 0;
  int searches = 0;
  bool failed = false;
  while (!handle.episode_done()) {
    ctx.ascent_active = env.task().ascent_objective && max_depth >= env.task().levels;
    bool progressed = false;
    if (auto planned = plan_next(state, config.priorities, registry, ctx)) {
      handle.begin(planned->plan.skill);
      const Outcome outcome = planned->skill->execute(planned->plan, handle);
      ++stats.invocations[planned->plan.skill];
      progressed = outcome.actions > 0;
    }
    max_depth = std::max(max_depth, env.observation().blstats.depth);
    if (progressed) {
      streak = 0;
      searches = 0;
      continue;
    }
    if (handle.episode_done()) break;

    handle.begin("");
    if (searches < config.params.fallback_searches && ctx.legal.contains(Action::Search)) {
      ++searches;
      handle.act(Action::Search);
    } else {
      std::vector<Action> moves = legal_moves(state, ctx.legal);
      if (moves.empty()) {
        for (Action a : kMoves) {
          if (ctx.legal.contains(a)) moves.push_back(a);
        }
      }
      searches = 0;
      if (moves.empty()) {
        failed = true;
        break;
      }
      handle.act(moves[static_cast<std::size_t>(rng.below(static_cast<int>(moves.size())))]);
    }
    ++stats.fallback_actions;
    max_depth = std::max(max_depth, env.observation().blstats.depth);
    if (++streak >= config.params.fallback_limit && !env.done()) {
      failed = true;
      break;
    }
  }

  const BlStats& bl = env.observation().blstats;
  stats.score = bl.score;
  stats.turns = bl.turn;
  stats.actions = env.actions_taken();
  stats.max_depth = env.counters().max_depth;
  if (const auto reason = env.end_reason()) {
    switch (*reason) {
      case EndReason::Goal: stats.end = EpisodeEnd::Goal; break;
      case EndReason::Death: stats.end = EpisodeEnd::Death; break;
      case EndReason::StepLimit: stats.end = EpisodeEnd::StepLimit; break;
      case EndReason::Ascended: stats.end = EpisodeEnd::Ascended; break;
    }
  } else {
    stats.end = failed ? EpisodeEnd::Failed : EpisodeEnd::StepLimit;
  }
  return stats;
}

EpisodeStats run_episode(const TaskSpec& task, const SkillRegistry& registry, const AgentConfig& config,
                         int max_steps) {
  Env env;
  const Observation first = env.reset(task);
  return run_episode(env, first, registry, config, max_steps);
}

}  // namespace mera
