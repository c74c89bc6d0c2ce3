#include <gtest/gtest.h>

#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mera/agent.hpp"
#include "mera/env.hpp"
#include "mera/error.hpp"
#include "mera/skills.hpp"
#include "support.hpp"

using namespace mera;

namespace {

// Independent reachability oracle: plain BFS over the generator's
// connectivity notion, 8-neighbourhood.
bool bfs_reaches(const Grid<CellKind>& cells, Cell from, Cell to) {
  Grid<bool> seen(cells.extent(), false);
  std::deque<Cell> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == to) return true;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if (!cells.contains(n) || seen[n] || !connective(cells[n])) continue;
        seen[n] = true;
        queue.push_back(n);
      }
    }
  }
  return false;
}

int count_kind(const Grid<CellKind>& cells, CellKind k) {
  return static_cast<int>(std::count(cells.data().begin(), cells.data().end(), k));
}

}  // namespace

TEST(Generate, DeterministicForSameSeed) {
  const TaskSpec task = TaskSpec::full_game(7);
  EXPECT_EQ(generate_level(7, 1, task), generate_level(7, 1, task));
  EXPECT_NE(generate_level(7, 1, task).cells, generate_level(8, 1, task).cells);
}

TEST(Generate, KeyRoomHasOneKeyAndOneLockedDoor) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const LevelMap l = generate_level(seed, 1, TaskSpec::key_room(seed));
    int keys = 0;
    for (const Entity& e : l.entities) keys += std::holds_alternative<Key>(e.kind) ? 1 : 0;
    EXPECT_EQ(keys, 1) << "seed " << seed;
    EXPECT_EQ(count_kind(l.cells, CellKind::DoorLocked), 1) << "seed " << seed;
  }
}

TEST(Generate, StairsReachableFromSpawn) {
  const LevelMap l42 = generate_level(42, 1, TaskSpec::full_game(42));
  ASSERT_TRUE(l42.stairs_down);
  EXPECT_TRUE(bfs_reaches(l42.cells, l42.spawn, *l42.stairs_down));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const TaskSpec task = TaskSpec::full_game(seed);
    for (int depth = 1; depth <= task.levels; ++depth) {
      const LevelMap l = generate_level(seed, depth, task);
      if (depth < task.levels) {
        ASSERT_TRUE(l.stairs_down);
        EXPECT_TRUE(bfs_reaches(l.cells, l.spawn, *l.stairs_down)) << seed << "/" << depth;
      }
      if (depth > 1) {
        ASSERT_TRUE(l.stairs_up);
        EXPECT_TRUE(bfs_reaches(l.cells, l.spawn, *l.stairs_up)) << seed << "/" << depth;
      }
    }
  }
}

TEST(Generate, RejectsBadArguments) {
  EXPECT_THROW(generate_level(1, 0, TaskSpec::full_game(1)), InvalidArgument);
  EXPECT_THROW(generate_level(1, 1, TaskSpec::full_game(1, 1)), InvalidArgument);
}

TEST(Reset, Room5x5InitialState) {
  Env env;
  const Observation obs = env.reset(TaskSpec::room5x5(3));
  ASSERT_EQ(env.level().rooms.size(), 1u);
  const Room& r = env.level().rooms.front();
  EXPECT_EQ(r.bottom - r.top - 1, 5);
  EXPECT_EQ(r.right - r.left - 1, 5);
  EXPECT_TRUE(r.interior(env.agent_pos()));
  EXPECT_EQ(obs.blstats.turn, 0);
  EXPECT_EQ(obs.glyphs[env.agent_pos()], glyph::kAgent);
}

TEST(Reset, FullGameInitialState) {
  Env env;
  const Observation obs = env.reset(TaskSpec::full_game(5));
  EXPECT_EQ(obs.blstats.depth, 1);
  EXPECT_EQ(obs.blstats.gold, 0);
  EXPECT_EQ(obs.blstats.score, 0);
  EXPECT_EQ(obs.blstats.hp, obs.blstats.max_hp);
}

TEST(Reset, SameSeedSameObservation) {
  Env a, b;
  EXPECT_EQ(a.reset(TaskSpec::full_game(11)), b.reset(TaskSpec::full_game(11)));
  EXPECT_EQ(a.reset(TaskSpec::key_room(11)), b.reset(TaskSpec::key_room(11)));
}

TEST(Reset, RejectsZeroStepBudget) {
  Env env;
  EXPECT_THROW(env.reset(TaskSpec::room5x5(1, 0)), InvalidArgument);
}

TEST(Step, WallBumpKeepsPositionAndTurn) {
  Env env;
  env.reset(test::scenario_task(), test::room_level(6, 6, {1, 1}));
  const StepResult r = env.step(Action::N);
  EXPECT_EQ(env.agent_pos(), (Cell{1, 1}));
  EXPECT_EQ(r.observation.message, "It's a wall.");
  EXPECT_EQ(r.observation.blstats.turn, 0);
  EXPECT_EQ(env.actions_taken(), 1);
}

TEST(Step, MoveAdvancesTurn) {
  Env env;
  env.reset(test::scenario_task(), test::room_level(6, 6, {1, 1}));
  const StepResult r = env.step(Action::SE);
  EXPECT_EQ(env.agent_pos(), (Cell{2, 2}));
  EXPECT_EQ(r.observation.blstats.turn, 1);
  EXPECT_FALSE(r.done);
}

TEST(Step, DeathEndsEpisode) {
  Env env;
  LevelMap l = test::room_level(5, 5, {2, 2});
  l.entities.push_back(test::monster(1, {2, 3}, "soldier ant"));
  env.reset(test::scenario_task(), std::move(l));
  env.set_hp(1);
  StepResult r;
  for (int i = 0; i < 200 && !env.done(); ++i) r = env.step(Action::Wait);
  ASSERT_TRUE(r.done);
  EXPECT_EQ(env.end_reason(), EndReason::Death);
  EXPECT_EQ(env.hp(), 0);
  EXPECT_EQ(r.info.reason, EndReason::Death);
  EXPECT_THROW(env.step(Action::Wait), EpisodeFinished);
}

TEST(Step, GoalReachedOnStairs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TaskSpec task = TaskSpec::room5x5(seed);
    LevelMap l = generate_level(seed, 1, task);
    ASSERT_TRUE(l.stairs_down);
    const Cell goal = *l.stairs_down;
    std::optional<Cell> start;
    for (Action a : kMoves) {
      const Cell c = goal - move_delta(a);
      if (l.cells.contains(c) && l.cells[c] == CellKind::Floor && !start) start = c;
    }
    ASSERT_TRUE(start);
    l.spawn = *start;
    l.entities.clear();
    Env env;
    env.reset(task, l);
    const StepResult r = env.step(*move_toward_adjacent(*start, goal));
    EXPECT_TRUE(r.done);
    EXPECT_EQ(r.info.reason, EndReason::Goal);
    EXPECT_DOUBLE_EQ(r.reward, 1.0);
  }
}

TEST(Step, StepLimitEndsEpisode) {
  Env env;
  env.reset(TaskSpec::room5x5(1, 3), test::room_level(7, 7, {3, 3}));
  StepResult r;
  for (int i = 0; i < 3; ++i) r = env.step(Action::Search);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.info.reason, EndReason::StepLimit);
}

TEST(Step, RoomTasksRejectCommandsOutsideTheirSet) {
  Env env;
  env.reset(TaskSpec::room5x5(1));
  EXPECT_THROW(env.step(Action::Pray), IllegalAction);
}

TEST(Step, GoldPickupAddsToScoreCounters) {
  Env env;
  LevelMap l = test::room_level(5, 6, {2, 1});
  l.entities.push_back(Entity{1, {2, 2}, Gold{7}});
  env.reset(test::scenario_task(), std::move(l));
  env.step(Action::E);
  const StepResult r = env.step(Action::PickUp);
  EXPECT_EQ(r.observation.blstats.gold, 7);
  EXPECT_EQ(env.counters().gold, 7);
}

TEST(Score, FormulaExamples) {
  EXPECT_EQ(compute_score({0, 1, 0, 0}), 0);
  EXPECT_EQ(compute_score({30, 3, 2, 105}), 180);
}

TEST(Score, ReplayOfEventsMatchesFinalScore) {
  const SkillRegistry registry = default_registry();
  AgentConfig cfg;
  cfg.priorities = default_priorities();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Env env;
    const Observation first = env.reset(TaskSpec::full_game(seed));
    run_episode(env, first, registry, cfg, 5000);
    ScoreCounters replay{0, 1, 0, 0};
    for (const ScoreEvent& e : env.score_events()) {
      switch (e.kind) {
        case ScoreEventKind::Gold: replay.gold += e.amount; break;
        case ScoreEventKind::Depth: replay.max_depth += e.amount; break;
        case ScoreEventKind::Kill: replay.kills += e.amount; break;
        case ScoreEventKind::Explore: replay.cells_explored += e.amount; break;
      }
    }
    EXPECT_EQ(replay, env.counters()) << "seed " << seed;
    EXPECT_EQ(compute_score(replay), env.observation().blstats.score) << "seed " << seed;
  }
}

TEST(Render, BlankObservation) {
  const Observation obs = blank_observation({4, 6});
  std::vector<std::string> lines;
  std::istringstream in(render_ascii(obs));
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "");
  for (int r = 1; r <= 4; ++r) EXPECT_EQ(lines[static_cast<std::size_t>(r)], std::string(6, ' '));
  EXPECT_EQ(lines[5].rfind("HP:", 0), 0u);
}

TEST(Render, GoldenRoom5x5) {
  Env env;
  const std::string text = render_ascii(env.reset(TaskSpec::room5x5(3)));
  const std::filesystem::path golden = std::filesystem::path(MERA_TEST_DATA) / "golden" / "room5x5_seed3.txt";
  std::ifstream in(golden, std::ios::binary);
  ASSERT_TRUE(in) << "missing " << golden;
  std::ostringstream expected;
  expected << in.rdbuf();
  EXPECT_EQ(text, expected.str());
}

TEST(Render, DistinctStatesRenderDifferently) {
  std::vector<Glyph> vocab = {glyph::kBlank, glyph::kAgent, glyph::kFood, glyph::kGold, glyph::kKey, glyph::kPet};
  for (int k = 0; k < static_cast<int>(CellKind::HiddenCorridor); ++k) vocab.push_back(glyph::kTerrainBase + k);
  for (int s = 0; s < static_cast<int>(species_table().size()); ++s) vocab.push_back(glyph::kMonsterBase + s);

  Rng rng(99);
  auto random_obs = [&] {
    Observation o = blank_observation({5, 7});
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 7; ++c) o.glyphs.at(r, c) = vocab[static_cast<std::size_t>(rng.below(static_cast<int>(vocab.size())))];
    }
    o.blstats.hp = rng.between(0, 20);
    o.blstats.max_hp = 20;
    o.blstats.gold = rng.between(0, 3);
    o.blstats.turn = rng.between(0, 3);
    o.blstats.hunger = static_cast<Hunger>(rng.below(5));
    o.chars = chars_for(o.glyphs);
    return o;
  };
  for (int trial = 0; trial < 2000; ++trial) {
    Observation a = random_obs();
    Observation b = a;
    if (rng.chance(1, 2)) {
      const Cell c{rng.below(5), rng.below(7)};
      b.glyphs[c] = vocab[static_cast<std::size_t>(rng.below(static_cast<int>(vocab.size())))];
      b.chars = chars_for(b.glyphs);
    } else {
      b.blstats.gold += rng.between(0, 1);
      b.blstats.hp = rng.between(0, 20);
    }
    const bool same = a.glyphs == b.glyphs && a.blstats == b.blstats;
    EXPECT_EQ(render_ascii(a) == render_ascii(b), same);
  }
}
