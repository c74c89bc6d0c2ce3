#include <gtest/gtest.h>

#include "mera/error.hpp"
#include "mera/skills.hpp"
#include "support.hpp"

using namespace mera;

namespace {

class Dance final : public Skill {
 public:
  std::string_view name() const override { return "Dance"; }
  std::optional<Plan> plan(const GameState&, const PlanContext&) const override {
    Plan p;
    p.skill = "Dance";
    p.payload = Action::Wait;
    return p;
  }
  Outcome execute(const Plan&, EpisodeHandle& h) const override {
    h.act(Action::Wait);
    return h.finish(OutcomeStatus::Completed);
  }
};

GameState start_state(LevelMap l, Env& env) { return refine(GameState{}, env.reset(test::scenario_task(), std::move(l))); }

bool same_stats(const EpisodeStats& a, const EpisodeStats& b) {
  return a.seed == b.seed && a.score == b.score && a.turns == b.turns && a.actions == b.actions &&
         a.max_depth == b.max_depth && a.end == b.end && a.invocations == b.invocations &&
         a.fallback_actions == b.fallback_actions;
}

}  // namespace

TEST(Registry, RegisterResolveDuplicate) {
  SkillRegistry r;
  const auto fight = make_builtin_skill("Fight");
  r.register_skill(fight);
  EXPECT_EQ(&r.resolve("Fight"), fight.get());
  EXPECT_THROW(r.register_skill(make_builtin_skill("Fight")), DuplicateName);
  EXPECT_THROW(r.resolve("Fly"), UnknownSkill);
  EXPECT_THROW(validate_priorities({"Fight", "Fly"}, r), UnknownSkill);
  EXPECT_THROW(validate_priorities({"Fight", "Fight"}, r), DuplicateName);
}

TEST(PlanNext, PrayFirstWhenLow) {
  Env env;
  GameState s = start_state(test::room_level(7, 7, {3, 3}), env);
  env.set_hp(3);
  s = refine(s, env.observation());
  const auto p = plan_next(s, default_priorities(), default_registry(), {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->plan.skill, "Pray");
}

TEST(PlanNext, GoldBeforeStairs) {
  LevelMap l = test::room_level(7, 9, {3, 1});
  l.cells.at(3, 7) = CellKind::StairsDown;
  l.stairs_down = Cell{3, 7};
  l.entities.push_back(Entity{1, {1, 4}, Gold{5}});
  Env env;
  const GameState s = start_state(std::move(l), env);
  const auto p = plan_next(s, default_priorities(), default_registry(), {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->plan.skill, "Gold");
}

TEST(PlanNext, NothingPlannable) {
  Env env;
  const GameState s = start_state(test::room_level(7, 7, {3, 3}), env);
  EXPECT_FALSE(plan_next(s, {"Pray", "Fight", "Gold"}, default_registry(), {}));
  EXPECT_THROW(plan_next(s, {"Pray", "Fly"}, default_registry(), {}), UnknownSkill);
}

TEST(PlanNext, SkipsSkillsWithHiddenKeys) {
  Env env;
  GameState base;
  base.exposed = {ObsKey::Glyphs};
  env.reset(test::scenario_task(), test::room_level(7, 7, {3, 3}));
  env.set_hp(3);
  const GameState s = refine(base, env.observation());
  const auto p = plan_next(s, {"Pray", "RandomWalk"}, default_registry(), {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->plan.skill, "RandomWalk");
}

TEST(PlanNext, CustomSkillParticipates) {
  SkillRegistry r = default_registry();
  r.register_skill(std::make_shared<Dance>());
  Env env;
  const GameState s = start_state(test::room_level(7, 7, {3, 3}), env);
  const auto p = plan_next(s, {"Pray", "Dance", "RandomWalk"}, r, {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->plan.skill, "Dance");

  AgentConfig cfg;
  cfg.priorities = {"Pray", "Dance"};
  const EpisodeStats st = run_episode(TaskSpec::room5x5(1, 20), r, cfg, 20);
  EXPECT_EQ(st.invocations.at("Dance"), 20);
  EXPECT_EQ(st.end, EpisodeEnd::StepLimit);
}

TEST(PlanNext, PrioritySoundness) {
  const SkillRegistry registry = default_registry();
  const PriorityList prio = default_priorities();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    AgentConfig cfg;
    cfg.priorities = prio;
    int checked = 0;
    cfg.on_step = [&](const StepEvent& ev) {
      if (checked++ % 7 != 0) return;
      const auto p = plan_next(ev.after, prio, registry, {});
      if (!p) return;
      for (const auto& name : prio) {
        if (name == p->plan.skill) break;
        EXPECT_FALSE(plan_skill(registry, name, ev.after)) << name << " outranks " << p->plan.skill;
      }
    };
    run_episode(TaskSpec::full_game(seed), registry, cfg, 1500);
  }
}

TEST(RunEpisode, RejectsZeroSteps) {
  AgentConfig cfg;
  cfg.priorities = room_priorities();
  EXPECT_THROW(run_episode(TaskSpec::room5x5(1), default_registry(), cfg, 0), InvalidArgument);
}

TEST(RunEpisode, RoomSolvedWithinBudget) {
  AgentConfig cfg;
  cfg.priorities = {"ExploreClosest", "Unseen", "Horizon"};
  const SkillRegistry registry = default_registry();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const EpisodeStats st = run_episode(TaskSpec::room5x5(seed), registry, cfg, 99);
    EXPECT_EQ(st.end, EpisodeEnd::Goal) << "seed " << seed;
    EXPECT_LE(st.turns, 99);
  }
}

TEST(RunEpisode, Deterministic) {
  AgentConfig cfg;
  cfg.priorities = default_priorities();
  const SkillRegistry registry = default_registry();
  for (std::uint64_t seed : {3u, 17u}) {
    const EpisodeStats a = run_episode(TaskSpec::full_game(seed), registry, cfg, 5000);
    const EpisodeStats b = run_episode(TaskSpec::full_game(seed), registry, cfg, 5000);
    EXPECT_TRUE(same_stats(a, b));
    EXPECT_LE(a.actions, 5000);
    EXPECT_LE(a.turns, a.actions);
  }
}

TEST(RunEpisode, FallbackEndsAsFailedWhenStuck) {
  // A closed cell with nothing to plan: searches, then random moves that all bump.
  LevelMap l = test::room_level(3, 3, {1, 1});
  AgentConfig cfg;
  cfg.priorities = {"Gold"};
  Env env;
  const Observation first = env.reset(test::scenario_task(), std::move(l));
  const EpisodeStats st = run_episode(env, first, default_registry(), cfg, 5000);
  EXPECT_EQ(st.end, EpisodeEnd::Failed);
  EXPECT_EQ(st.fallback_actions, cfg.params.fallback_limit);
}

TEST(Handle, SafetyInterruptOnNewHostile) {
  LevelMap l = test::room_level(9, 12, {4, 1});
  l.entities.push_back(Entity{1, {4, 10}, Gold{3}});
  l.entities.push_back(test::monster(2, {2, 4}, "jackal"));
  Env env;
  GameState s = refine(GameState{}, env.reset(test::scenario_task(), std::move(l)));
  Rng rng(1);
  PlanContext ctx;
  EpisodeHandle h(env, s, rng, ctx, 1000);
  const auto p = plan_skill("Gold", s, ctx);
  ASSERT_TRUE(p);
  h.begin("Gold");
  const Outcome o = make_builtin_skill("Gold")->execute(*p, h);
  EXPECT_EQ(o.status, OutcomeStatus::Interrupted);
  EXPECT_GE(s.threat.adjacent_hostiles, 1);
  EXPECT_GE(o.actions, 1);
}

TEST(Handle, BudgetCapsOneExecution) {
  Env env;
  GameState s = refine(GameState{}, env.reset(test::scenario_task(), test::room_level(5, 5, {2, 2})));
  Rng rng(1);
  PlanContext ctx;
  ctx.params.max_plan_actions = 3;
  EpisodeHandle h(env, s, rng, ctx, 1000);
  h.begin("x");
  int n = 0;
  while (h.act(Action::Search)) ++n;
  EXPECT_EQ(h.actions(), 3);
  EXPECT_FALSE(h.budget_left());
}

TEST(LegalMoves, KnownWalkableOrCreature) {
  LevelMap l = test::room_level(5, 5, {1, 1});
  l.entities.push_back(test::monster(1, {2, 2}, "newt"));
  Env env;
  const GameState s = refine(GameState{}, env.reset(test::scenario_task(), std::move(l)));
  const auto moves = legal_moves(s, ActionSet::all());
  EXPECT_EQ(moves, (std::vector<Action>{Action::E, Action::SE, Action::S}));
}
