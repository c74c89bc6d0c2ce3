#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "mera/cli.hpp"
#include "mera/error.hpp"

using namespace mera;
namespace fs = std::filesystem;

namespace {

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

// Fresh scratch directory per test.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "mera_cli_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mera");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string room_config(int attempts, bool fast) {
  return std::string(R"({"skill_priority_list": ["ExploreClosest", "Unseen"], "fast_mode": ")") + (fast ? "on" : "off") +
         R"(", "attempts": )" + std::to_string(attempts) + "}";
}

}  // namespace

TEST(Config, SampleFileParses) {
  const RunConfig c = parse_config(kSampleConfig);
  EXPECT_EQ(c.skill_priority_list,
            (PriorityList{"Pray", "Eat", "Elbereth", "Run", "Break", "Fight", "Gold", "StairsDescend", "StairsAscend",
                          "ExploreClosest", "Horizon", "Unseen", "HiddenRoom", "HiddenCorridor"}));
  EXPECT_EQ(c.fast_mode, FastMode::On);
  EXPECT_EQ(c.attempts, 5);
  EXPECT_FALSE(c.skill_params);
}

TEST(Config, AttemptsAsStringOrNumber) {
  EXPECT_EQ(parse_config(R"({"skill_priority_list": ["Gold"], "attempts": "5"})").attempts, 5);
  EXPECT_EQ(parse_config(R"({"skill_priority_list": ["Gold"], "attempts": 5})").attempts, 5);
  EXPECT_THROW(parse_config(R"({"skill_priority_list": ["Gold"], "attempts": "five"})"), InvalidValue);
  EXPECT_THROW(parse_config(R"({"skill_priority_list": ["Gold"], "attempts": 0})"), InvalidValue);
}

TEST(Config, UnknownSkillNamed) {
  try {
    parse_config(R"({"skill_priority_list": ["Pray", "Fly"]})");
    FAIL() << "expected UnknownSkillName";
  } catch (const UnknownSkillName& e) {
    EXPECT_EQ(std::string(e.what()), "Fly");
  }
}

TEST(Config, DiagnosticsNameTheKey) {
  EXPECT_THROW(parse_config("{\"skill_priority_list\": ["), MalformedJson);
  auto message = [](std::string_view text) {
    try {
      parse_config(text);
    } catch (const InvalidValue& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"skill_priority_list": ["Gold"], "speed": 3})").find("speed"), std::string::npos);
  EXPECT_NE(message(R"({"skill_priority_list": ["Gold"], "fast_mode": "maybe"})").find("fast_mode"), std::string::npos);
  EXPECT_NE(message(R"({"skill_priority_list": ["Gold", "Gold"]})").find("skill_priority_list"), std::string::npos);
  EXPECT_NE(message(R"({"fast_mode": "on"})").find("skill_priority_list"), std::string::npos);
  EXPECT_NE(message(R"({"skill_priority_list": ["Gold"], "skill_params": {"search_cap": -1}})").find("search_cap"),
            std::string::npos);
}

TEST(Config, RoundTrip) {
  RunConfig c = parse_config(kSampleConfig);
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  c = parse_config(R"({"skill_priority_list": ["Gold"], "fast_mode": "off", "attempts": 2,
                       "skill_params": {"search_cap": 8, "rest_hp_fraction": 0.5}})");
  ASSERT_TRUE(c.skill_params);
  EXPECT_EQ(c.skill_params->search_cap, 8);
  EXPECT_DOUBLE_EQ(c.skill_params->rest_hp_fraction, 0.5);
  EXPECT_EQ(c.skill_params->prayer_timeout, SkillParams{}.prayer_timeout);
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Stats, MeanAndMedian) {
  EXPECT_DOUBLE_EQ(median_of({100, 817, 2000}), 817.0);
  EXPECT_DOUBLE_EQ(median_of({2000, 100, 817}), 817.0);
  EXPECT_DOUBLE_EQ(median_of({10, 20}), 15.0);
  EXPECT_DOUBLE_EQ(median_of({}), 0.0);
  const std::vector<double> v{10, 20};
  EXPECT_DOUBLE_EQ(mean_of(v), 15.0);
}

TEST(FastReport, Format) {
  EXPECT_EQ(fast_mode_report({}, {40, 100}), "games: 0 | mean: - | median: - | current score: 40 | turns: 100");
  std::vector<EpisodeStats> h(2);
  h[0].score = 10;
  h[1].score = 20;
  EXPECT_EQ(fast_mode_report(h, {3, 7}), "games: 2 | mean: 15.0 | median: 15.0 | current score: 3 | turns: 7");
}

TEST(FastReport, EveryTurnMatchesRegex) {
  const fs::path dir = scratch();
  write(dir / "config.json", room_config(3, true));
  const CliRun r = cli({"--inference", "--config", (dir / "config.json").string(), "--task", "Room5x5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::regex line(R"(games: \d+ \| mean: (-|\d+\.\d) \| median: (-|\d+\.\d) \| current score: -?\d+ \| turns: \d+)");
  int reports = 0;
  std::string chunk;
  std::istringstream in(r.out);
  while (std::getline(in, chunk, '\r')) {
    const std::string first = chunk.substr(0, chunk.find('\n'));
    if (first.empty()) continue;
    if (first.rfind("games:", 0) == 0) {
      ++reports;
      EXPECT_TRUE(std::regex_match(first, line)) << first;
    }
  }
  EXPECT_GT(reports, 3);
}

TEST(Flags, EveryTableFlagAccepted) {
  std::ostringstream out;
  const std::vector<std::string> argv{"mera", "--training", "--observation_keys", "glyphs,blstats", "--language_mode",
                                      "--keys_to_save", "glyphs", "--filename", "t.jsonl", "--training_alg", "bc",
                                      "--dataset", "data", "--checkpoint", "m.merapol", "--cuda", "--seed", "7",
                                      "--batch_size", "8", "--learning_rate", "0.1", "--scheduler_gamma", "0.9",
                                      "--epochs", "3"};
  const auto a = parse_cli(argv, out);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->mode, RunMode::Training);
  EXPECT_EQ(a->observation_keys, (ObservationKeySet{ObsKey::Glyphs, ObsKey::Blstats}));
  EXPECT_TRUE(a->language_mode);
  EXPECT_EQ(a->filename, "t.jsonl");
  EXPECT_EQ(a->dataset, "data");
  EXPECT_EQ(a->checkpoint, "m.merapol");
  EXPECT_TRUE(a->cuda);
  EXPECT_EQ(a->seed, 7u);
  EXPECT_EQ(a->batch_size, 8);
  EXPECT_DOUBLE_EQ(a->learning_rate, 0.1);
  EXPECT_DOUBLE_EQ(a->scheduler_gamma, 0.9);
  EXPECT_EQ(a->epochs, 3);
  EXPECT_TRUE(parse_cli(std::vector<std::string>{"mera", "--inference", "--no_cuda"}, out));
  EXPECT_TRUE(parse_cli(std::vector<std::string>{"mera", "--create_dataset", "--keys_to_save", "blstats",
                                                 "--filename", "x.jsonl"},
                        out));
}

TEST(Flags, ModeRules) {
  std::ostringstream out;
  using V = std::vector<std::string>;
  EXPECT_THROW(parse_cli(V{"mera"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--inference", "--training", "--dataset", "d"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--training"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--create_dataset", "--keys_to_save", "glyphs"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--create_dataset", "--filename", "f"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--inference", "--observation_keys", "pixels"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--inference", "--task", "Maze"}, out), UsageError);
  EXPECT_THROW(parse_cli(V{"mera", "--inference", "--bogus"}, out), UsageError);
  EXPECT_FALSE(parse_cli(V{"mera", "--help"}, out));
  EXPECT_NE(out.str().find("--keys_to_save"), std::string::npos);
}

TEST(ExitCodes, UsageAndRuntimeErrors) {
  const fs::path dir = scratch();
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"--inference", "--create_dataset"}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);

  write(dir / "fly.json", R"({"skill_priority_list": ["Pray", "Fly"]})");
  const CliRun fly = cli({"--inference", "--config", (dir / "fly.json").string()});
  EXPECT_EQ(fly.code, 2);
  EXPECT_NE(fly.err.find("Fly"), std::string::npos);

  write(dir / "broken.json", "{\"skill_priority_list\": [\"Pray\"");
  const CliRun broken = cli({"--inference", "--config", (dir / "broken.json").string()});
  EXPECT_EQ(broken.code, 2);
  EXPECT_NE(broken.err.find("malformed JSON"), std::string::npos);

  EXPECT_EQ(cli({"--inference", "--config", (dir / "missing.json").string()}).code, 2);
  EXPECT_EQ(cli({"--training", "--dataset", (dir / "nothing").string()}).code, 2);
}

TEST(Inference, AttemptsAndDeterminism) {
  const fs::path dir = scratch();
  write(dir / "config.json", room_config(3, false));
  CliArgs args;
  args.task = TaskKind::Room5x5;
  args.seed = 40;
  std::ostringstream out1, out2, err;
  const RunConfig cfg = load_config(dir / "config.json");
  const RunSummary a = run_inference(cfg, args, out1, err);
  const RunSummary b = run_inference(cfg, args, out2, err);
  ASSERT_EQ(a.episodes.size(), 3u);
  EXPECT_EQ(out1.str(), out2.str());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.episodes[i].score, b.episodes[i].score);
    EXPECT_EQ(a.episodes[i].turns, b.episodes[i].turns);
    EXPECT_EQ(a.episodes[i].seed, 40 + i);
  }
  // Standard mode prints the map every turn.
  EXPECT_NE(out1.str().find("HP:"), std::string::npos);
  EXPECT_NE(out1.str().find("median score"), std::string::npos);
}

TEST(Inference, ParallelMatchesSerial) {
  CliArgs args;
  args.task = TaskKind::FullGameChallenge;
  RunConfig cfg;
  cfg.skill_priority_list = default_priorities();
  cfg.fast_mode = FastMode::On;
  cfg.attempts = 4;
  std::ostringstream o1, o2, err;
  const RunSummary serial = run_inference(cfg, args, o1, err);
  args.parallel = 3;
  const RunSummary parallel = run_inference(cfg, args, o2, err);
  ASSERT_EQ(serial.episodes.size(), parallel.episodes.size());
  for (std::size_t i = 0; i < serial.episodes.size(); ++i) {
    EXPECT_EQ(serial.episodes[i].score, parallel.episodes[i].score);
    EXPECT_EQ(serial.episodes[i].turns, parallel.episodes[i].turns);
  }
  EXPECT_DOUBLE_EQ(serial.median, parallel.median);
}

TEST(Inference, WarnsAboutHiddenKeys) {
  const fs::path dir = scratch();
  write(dir / "config.json", R"({"skill_priority_list": ["Pray", "Unseen", "ExploreClosest"], "fast_mode": "on", "attempts": 1})");
  const CliRun r = cli({"--inference", "--config", (dir / "config.json").string(), "--task", "Room5x5",
                     "--observation_keys", "glyphs"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning: skill Pray"), std::string::npos);
  EXPECT_EQ(r.err.find("warning: skill Unseen"), std::string::npos);
}

TEST(Dataset, FilesPerAttemptAndLanguageKey) {
  const fs::path dir = scratch();
  write(dir / "config.json", room_config(2, true));
  const CliRun r = cli({"--create_dataset", "--config", (dir / "config.json").string(), "--task", "Room5x5",
                     "--keys_to_save", "blstats", "--language_mode", "--filename", (dir / "out" / "ep.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 2; ++i) {
    const fs::path p = dir / "out" / ("ep_" + std::to_string(i) + ".jsonl");
    ASSERT_TRUE(fs::exists(p)) << p;
    const TrajectoryRecord t = load(p);
    EXPECT_EQ(t.keys, (ObservationKeySet{ObsKey::Blstats, ObsKey::Language}));
    ASSERT_FALSE(t.steps.empty());
    for (const auto& s : t.steps) {
      EXPECT_EQ(s.fields.size(), 2u);
      EXPECT_TRUE(s.fields.contains("language"));
    }
  }
  EXPECT_EQ(episode_path("a/b/run.jsonl", 3), fs::path("a/b/run_3.jsonl"));
}

TEST(Dataset, StepsEqualTurns) {
  const fs::path dir = scratch();
  CliArgs args;
  args.mode = RunMode::CreateDataset;
  args.task = TaskKind::FullGameChallenge;
  args.keys_to_save = {ObsKey::Blstats};
  args.filename = (dir / "g.jsonl").string();
  RunConfig cfg;
  cfg.skill_priority_list = default_priorities();
  cfg.fast_mode = FastMode::On;
  cfg.attempts = 2;
  std::ostringstream out, err;
  const auto files = run_dataset(cfg, args, out, err);
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) {
    const TrajectoryRecord t = load(f);
    ASSERT_FALSE(t.steps.empty());
    const int last_turn = t.steps.back().fields.at("blstats").at("turn");
    EXPECT_EQ(static_cast<int>(t.steps.size()), last_turn + 1);
  }
}

TEST(Training, BcCheckpointAndCudaWarning) {
  const fs::path dir = scratch();
  write(dir / "config.json", room_config(6, true));
  ASSERT_EQ(cli({"--create_dataset", "--config", (dir / "config.json").string(), "--task", "Room5x5", "--keys_to_save",
                 "glyphs,blstats", "--filename", (dir / "data" / "ep.jsonl").string()})
                .code,
            0);
  const CliRun r = cli({"--training", "--training_alg", "bc", "--dataset", (dir / "data").string(), "--checkpoint",
                     (dir / "m.merapol").string(), "--epochs", "5", "--cuda"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("epoch 5 loss"), std::string::npos);
  const PolicyModel m = load_model(dir / "m.merapol");
  EXPECT_EQ(m.actions(), 8);

  const CliRun dagger = cli({"--training", "--training_alg", "dagger", "--dataset", (dir / "data").string()});
  EXPECT_EQ(dagger.code, 2);
  EXPECT_NE(dagger.err.find("dagger"), std::string::npos);

  // The trained checkpoint drives BCWalk in inference mode.
  write(dir / "bc.json", R"({"skill_priority_list": ["BCWalk"], "fast_mode": "on", "attempts": 2})");
  const CliRun play = cli({"--inference", "--config", (dir / "bc.json").string(), "--task", "Room5x5", "--checkpoint",
                        (dir / "m.merapol").string()});
  EXPECT_EQ(play.code, 0) << play.err;
}
