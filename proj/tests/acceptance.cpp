// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <queue>
#include <sstream>
#include <string>

#include "mera/cli.hpp"
#include "mera/error.hpp"
#include "mera/learn.hpp"
#include "mera/nav.hpp"
#include "mera/rng.hpp"
#include "mera/traj.hpp"

using namespace mera;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Independent Dijkstra over an 8-connected grid with unit and sqrt(2) steps.
std::optional<double> dijkstra(const Grid<bool>& open, Cell s, Cell g) {
  Grid<double> dist(open.extent(), INFINITY);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.push({0.0, open.index(s)});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    const Cell c = open.cell_of(i);
    if (d > dist[c]) continue;
    if (c == g) return d;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Cell n{c.row + dr, c.col + dc};
        if (!open.contains(n) || !open[n]) continue;
        const double w = (dr != 0 && dc != 0) ? std::sqrt(2.0) : 1.0;
        if (d + w < dist[n]) {
          dist[n] = d + w;
          pq.push({dist[n], open.index(n)});
        }
      }
    }
  }
  return std::nullopt;
}

Cell random_open(Rng& rng, const Grid<bool>& open) {
  for (;;) {
    const Cell c{rng.below(open.extent().rows), rng.below(open.extent().cols)};
    if (open[c]) return c;
  }
}

Verdict ac1_pathfinding() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  int solvable = 0, mismatches = 0;
  for (int m = 0; m < 200; ++m) {
    Grid<bool> open(30, 30, true);
    for (int r = 0; r < 30; ++r) {
      for (int c = 0; c < 30; ++c) open.at(r, c) = !rng.chance(30, 100);
    }
    const Cell s = random_open(rng, open), g = random_open(rng, open);
    const auto expected = dijkstra(open, s, g);
    const auto got = astar(open.extent(), [&](Cell c) { return open[c]; }, s, g);
    if (expected.has_value() != got.has_value()) {
      ++mismatches;
      continue;
    }
    if (!expected) continue;
    ++solvable;
    // Both sum the same multiset of 1 and sqrt(2) steps; compare exactly on step counts.
    const double recomputed = got->steps.straight + got->steps.diagonal * std::sqrt(2.0);
    if (std::abs(recomputed - *expected) > 1e-9 || std::abs(got->cost - *expected) > 1e-9) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 2.0,
          fmt("%d solvable of 200 maps, %d mismatches, %.3f s", solvable, mismatches, secs)};
}

Verdict ac2_consistency() {
  Rng rng(2);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Cell u{rng.below(60), rng.below(60)};
    Cell v = u;
    while (v == u) v = {u.row + rng.between(-1, 1), u.col + rng.between(-1, 1)};
    const Cell g{rng.below(60), rng.below(60)};
    const double step = (v.row != u.row && v.col != u.col) ? kSqrt2 : 1.0;
    if (heuristic(u, g, Metric::Octile) > step + heuristic(v, g, Metric::Octile) + 1e-12) ++violations;
  }
  return {violations == 0, fmt("10000 triples, %d violations", violations)};
}

int random_walk_goals(TaskSpec task, int n) {
  const SkillRegistry registry = default_registry();
  AgentConfig cfg;
  cfg.priorities = {"RandomWalk"};
  int goals = 0;
  for (int i = 0; i < n; ++i) {
    TaskSpec t = task;
    t.seed = task.seed + static_cast<std::uint64_t>(i);
    if (run_episode(t, registry, cfg, t.max_steps).end == EpisodeEnd::Goal) ++goals;
  }
  return goals;
}

Verdict ac3_bc() {
  const auto t0 = std::chrono::steady_clock::now();
  AgentConfig expert;
  expert.priorities = room_priorities();
  const auto data =
      record_dataset(TaskSpec::room5x5(0), 1000, default_registry(), expert, {ObsKey::Glyphs, ObsKey::Blstats});
  TrainConfig tc;
  tc.epochs = 5;
  tc.batch_size = 4;
  tc.learning_rate = 0.5;
  const TrainResult trained = default_trainers().resolve("bc").train(data, tc);
  const EvalResult bc = evaluate(trained.model, TaskSpec::room5x5(10000), 100);
  const int baseline = random_walk_goals(TaskSpec::room5x5(10000), 100);
  const double secs = seconds_since(t0);
  return {bc.successes >= 95 && bc.successes > baseline && secs < 300.0,
          fmt("%zu expert trajectories, BC %d/100, RandomWalk %d/100, %.1f s", data.size(), bc.successes, baseline,
              secs)};
}

Verdict ac4_rules() {
  const auto policy = std::make_shared<EpsilonGreedyPolicy>(0.5);
  const TaskSpec task = TaskSpec::key_room(0, 200);
  const RuleSet rules = default_rules(2.0);
  const EvalResult plain = evaluate(policy, task, 500, nullptr, SampleMode::Sample);
  const EvalResult ruled = evaluate(policy, task, 500, &rules, SampleMode::Sample);
  return {ruled.success_rate > plain.success_rate,
          fmt("without rules %.3f (%d/500), with rules %.3f (%d/500)", plain.success_rate, plain.successes,
              ruled.success_rate, ruled.successes)};
}

Verdict ac5_full_game() {
  const auto t0 = std::chrono::steady_clock::now();
  const SkillRegistry registry = default_registry();
  AgentConfig stack, walk;
  stack.priorities = default_priorities();
  walk.priorities = {"RandomWalk"};
  std::vector<double> stack_scores, walk_scores, depths;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TaskSpec task = TaskSpec::full_game(seed);
    const EpisodeStats s = run_episode(task, registry, stack, task.max_steps);
    stack_scores.push_back(s.score);
    depths.push_back(s.max_depth);
    walk_scores.push_back(run_episode(task, registry, walk, task.max_steps).score);
  }
  const double ms = median_of(stack_scores), mw = median_of(walk_scores), md = median_of(depths);
  const double secs = seconds_since(t0);
  return {ms >= 5 * mw && md >= 2 && secs < 600.0,
          fmt("skill stack median %.1f, RandomWalk median %.1f, median depth %.1f, %.1f s", ms, mw, md, secs)};
}

std::string trace(const TaskSpec& task, const AgentConfig& base) {
  std::ostringstream out;
  AgentConfig cfg = base;
  cfg.on_step = [&](const StepEvent& e) {
    out << e.skill << ' ' << action_name(e.action) << ' ' << e.text << ' '
        << blstats_to_json(e.result.observation.blstats).dump() << ' ' << e.result.observation.message << '\n';
  };
  const EpisodeStats s = run_episode(task, default_registry(), cfg, task.max_steps);
  out << "end " << episode_end_name(s.end) << ' ' << s.score << ' ' << s.turns << '\n';
  return out.str();
}

std::string trajectory_bytes(const TaskSpec& task, const AgentConfig& cfg, ObservationKeySet keys) {
  std::ostringstream out;
  save(record_episode(task, default_registry(), cfg, keys, task.seed).trajectory, out);
  return out.str();
}

std::string fast_report(TaskKind kind, std::uint64_t seed) {
  RunConfig config;
  config.skill_priority_list = kind == TaskKind::FullGameChallenge ? default_priorities() : room_priorities();
  config.fast_mode = FastMode::On;
  config.attempts = 2;
  CliArgs args;
  args.task = kind;
  args.seed = seed;
  std::ostringstream out, err;
  run_inference(config, args, out, err);
  return out.str();
}

Verdict ac6_determinism() {
  const std::vector<TaskSpec> tasks{TaskSpec::room5x5(7), TaskSpec::key_room(7), TaskSpec::room_ultimate(7),
                                    TaskSpec::full_game(7), TaskSpec::full_game(8)};
  int checks = 0, diffs = 0;
  for (const TaskSpec& task : tasks) {
    AgentConfig cfg;
    cfg.priorities = task.kind == TaskKind::FullGameChallenge ? default_priorities() : room_priorities();
    const ObservationKeySet all = ObservationKeySet::from_bits(0x1f);
    diffs += trace(task, cfg) != trace(task, cfg);
    diffs += trajectory_bytes(task, cfg, all) != trajectory_bytes(task, cfg, all);
    diffs += fast_report(task.kind, task.seed) != fast_report(task.kind, task.seed);
    checks += 3;
  }
  return {diffs == 0, fmt("%d comparisons, %d differences", checks, diffs)};
}

Verdict ac7_round_trip() {
  Rng rng(7);
  const SkillRegistry registry = default_registry();
  int files = 0, byte_diffs = 0, count_diffs = 0;
  for (int e = 0; e < 50; ++e) {
    const auto seed = static_cast<std::uint64_t>(rng.below(100000));
    TaskSpec task;
    AgentConfig cfg;
    cfg.priorities = room_priorities();
    switch (rng.below(4)) {
      case 0: task = TaskSpec::room5x5(seed); break;
      case 1: task = TaskSpec::key_room(seed); break;
      case 2: task = TaskSpec::room_ultimate(seed); break;
      default:
        task = TaskSpec::full_game(seed, 5, 1000);
        cfg.priorities = default_priorities();
        break;
    }
    for (std::uint8_t bits = 1; bits < 32; ++bits) {
      const RecordedEpisode rec = record_episode(task, registry, cfg, ObservationKeySet::from_bits(bits), seed);
      std::ostringstream first;
      save(rec.trajectory, first);
      std::istringstream in(first.str());
      std::ostringstream second;
      save(load(in), second);
      ++files;
      byte_diffs += first.str() != second.str();
      count_diffs += static_cast<int>(rec.trajectory.steps.size()) != rec.stats.turns;
    }
  }
  return {byte_diffs == 0 && count_diffs == 0,
          fmt("50 episodes x 31 key sets = %d files, %d byte differences, %d count mismatches", files, byte_diffs,
              count_diffs)};
}

Verdict ac8_gradients() {
  Rng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    PolicyModel m = move_policy_zeros();
    for (double& w : m.weights) w = (rng.unit() * 2 - 1) * 0.5;
    for (double& b : m.bias) b = (rng.unit() * 2 - 1) * 0.5;
    FeatureVector f(kFeatureSize);
    for (double& v : f) v = rng.chance(1, 10) ? rng.unit() * 2 - 1 : 0.0;
    worst = std::max(worst, gradient_check(m, f, kMoves[static_cast<std::size_t>(rng.below(8))]));
  }
  return {worst < 1e-4, fmt("100 pairs, max relative error %.3g", worst)};
}

constexpr std::string_view kSampleConfig = R"({"skill_priority_list": [
"Pray",
"Eat",
"Elbereth",
"Run",
"Break",
"Fight",
"Gold",
"StairsDescend",
"StairsAscend",
"ExploreClosest",
"Horizon",
"Unseen",
"HiddenRoom",
"HiddenCorridor"
],

"fast_mode": "on",
"attempts": "5"
}
)";

int exit_code(std::vector<std::string> args, std::string& err_text) {
  args.insert(args.begin(), "mera");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  err_text = err.str();
  return code;
}

Verdict ac9_interface() {
  std::vector<std::string> problems;
  const RunConfig c = parse_config(kSampleConfig);
  if (c.skill_priority_list != default_priorities() || c.fast_mode != FastMode::On || c.attempts != 5 ||
      c.skill_params) {
    problems.push_back("sample config");
  }

  std::ostringstream help;
  const std::vector<std::vector<std::string>> flag_sets{
      {"mera", "--inference", "--observation_keys", "glyphs,blstats", "--seed", "3", "--no_cuda"},
      {"mera", "--create_dataset", "--keys_to_save", "glyphs", "--language_mode", "--filename", "d.jsonl"},
      {"mera", "--training", "--training_alg", "bc", "--dataset", "d", "--checkpoint", "m", "--cuda", "--batch_size",
       "8", "--learning_rate", "0.1", "--scheduler_gamma", "0.9", "--epochs", "3"},
  };
  for (const auto& argv : flag_sets) {
    try {
      if (!parse_cli(argv, help)) problems.push_back("flags returned help");
    } catch (const Error& e) {
      problems.push_back(std::string("flags: ") + e.what());
    }
  }

  const fs::path dir = fs::temp_directory_path() / "mera_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "fly.json") << R"({"skill_priority_list": ["Pray", "Fly"]})";
  std::ofstream(dir / "broken.json") << "{\"skill_priority_list\": [\"Pray\"";
  std::ofstream(dir / "ok.json") << R"({"skill_priority_list": ["ExploreClosest", "Unseen"], "fast_mode": "on", "attempts": 1})";
  std::string err;
  if (exit_code({"--inference", "--config", (dir / "fly.json").string()}, err) != 2 ||
      err.find("unknown skill name: Fly") == std::string::npos) {
    problems.push_back("unknown skill diagnostic");
  }
  if (exit_code({"--inference", "--config", (dir / "broken.json").string()}, err) != 2 ||
      err.find("malformed JSON") == std::string::npos) {
    problems.push_back("malformed file diagnostic");
  }
  if (exit_code({"--inference", "--training"}, err) != 1) problems.push_back("usage exit code");
  if (exit_code({"--inference", "--config", (dir / "ok.json").string(), "--task", "Room5x5"}, err) != 0) {
    problems.push_back("success exit code");
  }
  fs::remove_all(dir);

  std::string detail = problems.empty() ? "config, flags, diagnostics and exit codes conform" : "failed:";
  for (const auto& p : problems) detail += " [" + p + "]";
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1 pathfinding optimality", ac1_pathfinding}, {"AC2 heuristic consistency", ac2_consistency},
      {"AC3 behavioural cloning", ac3_bc},             {"AC4 rule integration", ac4_rules},
      {"AC5 full-game score", ac5_full_game},          {"AC6 determinism", ac6_determinism},
      {"AC7 trajectory round trip", ac7_round_trip},   {"AC8 gradient correctness", ac8_gradients},
      {"AC9 interface conformance", ac9_interface},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
