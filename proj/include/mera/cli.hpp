#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mera/learn.hpp"

namespace mera {

enum class FastMode : std::uint8_t { Off, On };

/// Contents of the JSON configuration file.
struct RunConfig {
  PriorityList skill_priority_list;
  FastMode fast_mode = FastMode::Off;
  int attempts = 1;
  std::optional<SkillParams> skill_params;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Skill names a configuration may list.
std::vector<std::string> known_skill_names();

/// Throws MalformedJson, UnknownSkillName or InvalidValue; the message names
/// the offending key or skill.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

enum class RunMode : std::uint8_t { Inference, CreateDataset, Training };

struct CliArgs {
  RunMode mode = RunMode::Inference;
  std::optional<ObservationKeySet> observation_keys;
  ObservationKeySet keys_to_save;
  bool language_mode = false;
  std::string filename;
  std::string training_alg = "bc";
  std::string dataset;
  std::string checkpoint;
  bool cuda = false;
  std::uint64_t seed = 0;
  int batch_size = 4;
  double learning_rate = 0.5;
  double scheduler_gamma = 1.0;
  int epochs = 5;
  std::string config = "config.json";
  TaskKind task = TaskKind::FullGameChallenge;
  int parallel = 1;

  TrainConfig train_config() const;
};

/// Parses argv (argv[0] is the program name). Throws UsageError. Returns
/// nothing when help was requested; the help text goes to `out`.
std::optional<CliArgs> parse_cli(std::span<const std::string> argv, std::ostream& out);

/// Default task of a kind with the given seed.
TaskSpec task_for(TaskKind kind, std::uint64_t seed);

struct RunSummary {
  std::vector<EpisodeStats> episodes;
  double mean = 0.0;
  double median = 0.0;
};

double mean_of(std::span<const double> values);
/// Middle value, or the mean of the two middle values. 0 when empty.
double median_of(std::vector<double> values);

struct LiveStats {
  int score = 0;
  int turns = 0;
};

/// "games: N | mean: X | median: Y | current score: S | turns: T", with
/// "-" for mean and median before any game has finished.
std::string fast_mode_report(std::span<const EpisodeStats> history, LiveStats current);

/// Plays config.attempts episodes on seeds args.seed, args.seed + 1, ...
RunSummary run_inference(const RunConfig& config, const CliArgs& args, std::ostream& out, std::ostream& err);

/// Records one trajectory file per attempt; returns the paths written.
std::vector<std::filesystem::path> run_dataset(const RunConfig& config, const CliArgs& args, std::ostream& out,
                                               std::ostream& err);

/// Trajectory files under a directory (sorted by name) or a single file.
std::vector<TrajectoryRecord> load_dataset(const std::filesystem::path& path);

/// Trains with the named trainer and writes the checkpoint.
TrainResult run_training(const RunConfig& config, const CliArgs& args, std::ostream& out, std::ostream& err);

/// File written for episode `index`: "<stem>_<index><ext>" next to `base`.
std::filesystem::path episode_path(const std::filesystem::path& base, int index);

/// Whole program. Exit codes: 0 success, 1 usage error, 2 runtime error.
int run_cli(std::span<const std::string> argv, std::ostream& out, std::ostream& err);

}  // namespace mera
