#include "mera/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "mera/error.hpp"

namespace mera {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

template <class T>
struct ParamField {
  std::string_view key;
  T SkillParams::*member;
};

constexpr std::array<ParamField<int>, 9> kIntParams = {{
    {"pray_hp_divisor", &SkillParams::pray_hp_divisor},
    {"prayer_timeout", &SkillParams::prayer_timeout},
    {"elbereth_min_adjacent", &SkillParams::elbereth_min_adjacent},
    {"run_radius", &SkillParams::run_radius},
    {"run_hp_divisor", &SkillParams::run_hp_divisor},
    {"search_cap", &SkillParams::search_cap},
    {"max_plan_actions", &SkillParams::max_plan_actions},
    {"fallback_searches", &SkillParams::fallback_searches},
    {"fallback_limit", &SkillParams::fallback_limit},
}};

constexpr std::array<ParamField<double>, 2> kRealParams = {{
    {"rest_hp_fraction", &SkillParams::rest_hp_fraction},
    {"safety_hp_drop", &SkillParams::safety_hp_drop},
}};

SkillParams parse_skill_params(const json& j) {
  if (!j.is_object()) throw InvalidValue("skill_params: expected an object");
  SkillParams p;
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const auto& f : kIntParams) {
      if (f.key != key) continue;
      found = true;
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw InvalidValue("skill_params." + key + ": expected a non-negative integer");
      }
      p.*f.member = value.get<int>();
    }
    for (const auto& f : kRealParams) {
      if (f.key != key) continue;
      found = true;
      if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0) {
        throw InvalidValue("skill_params." + key + ": expected a number in [0, 1]");
      }
      p.*f.member = value.get<double>();
    }
    if (!found) throw InvalidValue("skill_params." + key + ": unknown parameter");
  }
  return p;
}

int parse_attempts(const json& v) {
  long long n = 0;
  if (v.is_number_integer()) {
    n = v.get<long long>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw InvalidValue("attempts: expected a positive integer, got \"" + s + "\"");
    }
    n = std::stoll(s);
  } else {
    throw InvalidValue("attempts: expected a positive integer");
  }
  if (n < 1 || n > 1000000) throw InvalidValue("attempts: expected a positive integer");
  return static_cast<int>(n);
}

}  // namespace

std::vector<std::string> known_skill_names() {
  std::vector<std::string> out;
  for (std::string_view n : builtin_skill_names()) out.emplace_back(n);
  out.emplace_back("BCWalk");
  out.emplace_back("NeuralWalk");
  return out;
}

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedJson(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidValue("config: expected a JSON object");

  RunConfig c;
  const auto known = known_skill_names();
  bool have_list = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "skill_priority_list") {
      if (!value.is_array()) throw InvalidValue("skill_priority_list: expected a list of skill names");
      std::set<std::string> seen;
      for (const auto& item : value) {
        if (!item.is_string()) throw InvalidValue("skill_priority_list: entries must be strings");
        std::string name = item.get<std::string>();
        if (std::find(known.begin(), known.end(), name) == known.end()) throw UnknownSkillName(name);
        if (!seen.insert(name).second) throw InvalidValue("skill_priority_list: " + name + " is listed twice");
        c.skill_priority_list.push_back(std::move(name));
      }
      have_list = true;
    } else if (key == "fast_mode") {
      if (value == "on" || value == true) {
        c.fast_mode = FastMode::On;
      } else if (value == "off" || value == false) {
        c.fast_mode = FastMode::Off;
      } else {
        throw InvalidValue("fast_mode: expected \"on\" or \"off\"");
      }
    } else if (key == "attempts") {
      c.attempts = parse_attempts(value);
    } else if (key == "skill_params") {
      c.skill_params = parse_skill_params(value);
    } else {
      throw InvalidValue(key + ": unknown configuration key");
    }
  }
  if (!have_list) throw InvalidValue("skill_priority_list: missing");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config) {
  json j;
  j["skill_priority_list"] = config.skill_priority_list;
  j["fast_mode"] = config.fast_mode == FastMode::On ? "on" : "off";
  j["attempts"] = config.attempts;
  if (config.skill_params) {
    json p = json::object();
    for (const auto& f : kIntParams) p[std::string(f.key)] = (*config.skill_params).*f.member;
    for (const auto& f : kRealParams) p[std::string(f.key)] = (*config.skill_params).*f.member;
    j["skill_params"] = p;
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

TrainConfig CliArgs::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.learning_rate = learning_rate;
  t.scheduler_gamma = scheduler_gamma;
  t.seed = seed;
  return t;
}

std::optional<CliArgs> parse_cli(std::span<const std::string> argv, std::ostream& out) {
  CliArgs a;
  CLI::App app{"Skill-based roguelike agent: play, record trajectories, or train a policy."};
  app.name(argv.empty() ? "mera" : argv.front());

  bool inference = false;
  bool create = false;
  bool training = false;
  bool no_cuda = false;
  std::vector<std::string> obs_keys;
  std::vector<std::string> save_keys;
  std::string task_name(task_kind_name(a.task));

  app.add_flag("--inference", inference, "Play the game with the configured skill stack");
  app.add_flag("--training", training, "Train a policy from a trajectory dataset");
  app.add_option("--observation_keys", obs_keys, "Observation fields the agent may use")->delimiter(',');
  app.add_flag("--create_dataset", create, "Record agent trajectories");
  app.add_flag("--language_mode", a.language_mode, "Add a language rendering to every recorded step");
  app.add_option("--keys_to_save", save_keys, "Observation fields to record")->delimiter(',');
  app.add_option("--filename", a.filename, "Trajectory file path; an episode index is appended");
  app.add_option("--training_alg", a.training_alg, "Training algorithm")->capture_default_str();
  app.add_option("--dataset", a.dataset, "Trajectory file or directory of files");
  app.add_option("--checkpoint", a.checkpoint, "Model checkpoint path");
  app.add_flag("--cuda", a.cuda, "Request GPU training (runs on the CPU)");
  app.add_flag("--no_cuda", no_cuda, "Train on the CPU");
  app.add_option("--seed", a.seed, "Base seed")->capture_default_str();
  app.add_option("--batch_size", a.batch_size, "Mini-batch size")->capture_default_str();
  app.add_option("--learning_rate", a.learning_rate, "Learning rate")->capture_default_str();
  app.add_option("--scheduler_gamma", a.scheduler_gamma, "Learning-rate decay per epoch")->capture_default_str();
  app.add_option("--epochs", a.epochs, "Training epochs")->capture_default_str();
  app.add_option("--config", a.config, "Configuration file")->capture_default_str();
  app.add_option("--task", task_name, "Room5x5, KeyRoomS5, RoomUltimate15x15 or FullGameChallenge")
      ->capture_default_str();
  app.add_option("--parallel", a.parallel, "Episodes to run at once")->capture_default_str();

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const auto& s : argv) raw.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (inference + create + training != 1) {
    throw UsageError("exactly one of --inference, --create_dataset, --training is required");
  }
  a.mode = inference ? RunMode::Inference : create ? RunMode::CreateDataset : RunMode::Training;
  if (a.cuda && no_cuda) throw UsageError("--cuda and --no_cuda are mutually exclusive");

  auto to_keys = [](const std::vector<std::string>& items, std::string_view flag) {
    ObservationKeySet keys;
    for (const auto& item : items) {
      try {
        const ObservationKeySet part = ObservationKeySet::parse(item);
        for (ObsKey k : part.keys()) keys.insert(k);
      } catch (const InvalidArgument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
      }
    }
    return keys;
  };
  if (!obs_keys.empty()) a.observation_keys = to_keys(obs_keys, "--observation_keys");
  a.keys_to_save = to_keys(save_keys, "--keys_to_save");

  const auto kind = parse_task_kind(task_name);
  if (!kind) throw UsageError("--task: unknown task " + task_name);
  a.task = *kind;
  if (a.parallel < 1) throw UsageError("--parallel must be at least 1");

  if (a.mode == RunMode::Training) {
    if (a.dataset.empty()) throw UsageError("--training requires --dataset");
    try {
      a.train_config().validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  if (a.mode == RunMode::CreateDataset) {
    if (a.filename.empty()) throw UsageError("--create_dataset requires --filename");
    if (a.keys_to_save.empty() && !a.language_mode) throw UsageError("--create_dataset requires --keys_to_save");
  }
  return a;
}

TaskSpec task_for(TaskKind kind, std::uint64_t seed) {
  switch (kind) {
    case TaskKind::Room5x5: return TaskSpec::room5x5(seed);
    case TaskKind::KeyRoomS5: return TaskSpec::key_room(seed);
    case TaskKind::RoomUltimate15x15: return TaskSpec::room_ultimate(seed);
    case TaskKind::FullGameChallenge: return TaskSpec::full_game(seed);
  }
  return TaskSpec::full_game(seed);
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::vector<double> scores_of(std::span<const EpisodeStats> episodes) {
  std::vector<double> out;
  for (const auto& e : episodes) out.push_back(e.score);
  return out;
}

}  // namespace

std::string fast_mode_report(std::span<const EpisodeStats> history, LiveStats current) {
  const std::vector<double> scores = scores_of(history);
  std::ostringstream out;
  out << "games: " << history.size() << " | mean: " << (scores.empty() ? "-" : fixed1(mean_of(scores)))
      << " | median: " << (scores.empty() ? "-" : fixed1(median_of(scores))) << " | current score: " << current.score
      << " | turns: " << current.turns;
  return out.str();
}

// ---------------------------------------------------------------------------
// Run modes
// ---------------------------------------------------------------------------

namespace {

struct Session {
  SkillRegistry registry;
  AgentConfig agent;
};

Session make_session(const RunConfig& config, const CliArgs& args, std::ostream& err) {
  Session s;
  std::shared_ptr<const MovePolicy> policy;
  if (!args.checkpoint.empty()) policy = std::make_shared<ModelPolicy>(load_model(std::filesystem::path(args.checkpoint)));
  s.registry = policy ? default_registry(policy, nullptr, SampleMode::Argmax) : default_registry();
  if (policy) {
    s.registry.register_skill(std::make_shared<PolicyWalk>("NeuralWalk", policy, SampleMode::Sample));
  }
  s.agent.priorities = config.skill_priority_list;
  validate_priorities(s.agent.priorities, s.registry);
  if (config.skill_params) s.agent.params = *config.skill_params;
  if (args.observation_keys) {
    ObservationKeySet exposed;
    for (ObsKey k : args.observation_keys->keys()) {
      if (k != ObsKey::Language) exposed.insert(k);
    }
    s.agent.exposed = exposed;
    for (const auto& name : s.agent.priorities) {
      const ObservationKeySet need = s.registry.resolve(name).required_keys();
      if (!exposed.contains_all(need)) {
        err << "warning: skill " << name << " needs observation keys {" << need.to_string()
            << "} and will never be planned\n";
      }
    }
  }
  return s;
}

// Per-turn output: the map in standard mode, the report line in fast mode.
StepHook turn_printer(const RunConfig& config, std::span<const EpisodeStats> history, std::ostream& out) {
  if (config.fast_mode == FastMode::On) {
    return [&out, history](const StepEvent& ev) {
      const BlStats& b = ev.result.observation.blstats;
      out << '\r' << fast_mode_report(history, {b.score, b.turn});
    };
  }
  return [&out](const StepEvent& ev) { out << render_ascii(ev.result.observation) << '\n'; };
}

void print_episode(std::ostream& out, std::size_t index, const EpisodeStats& st) {
  out << "episode " << index << ": score " << st.score << " turns " << st.turns << " max_depth " << st.max_depth
      << " end " << episode_end_name(st.end) << '\n';
}

}  // namespace

RunSummary run_inference(const RunConfig& config, const CliArgs& args, std::ostream& out, std::ostream& err) {
  const Session session = make_session(config, args, err);
  RunSummary summary;
  const int n = config.attempts;

  if (args.parallel > 1) {
    std::vector<EpisodeStats> results(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(args.parallel));
    std::vector<std::thread> workers;
    for (int w = 0; w < args.parallel; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (int i = w; i < n; i += args.parallel) {
            const TaskSpec task = task_for(args.task, args.seed + static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = run_episode(task, session.registry, session.agent, task.max_steps);
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const auto& st : results) {
      if (config.fast_mode == FastMode::On) out << fast_mode_report(summary.episodes, {st.score, st.turns}) << '\n';
      summary.episodes.push_back(st);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const TaskSpec task = task_for(args.task, args.seed + static_cast<std::uint64_t>(i));
      AgentConfig agent = session.agent;
      agent.on_step = turn_printer(config, summary.episodes, out);
      summary.episodes.push_back(run_episode(task, session.registry, agent, task.max_steps));
      if (config.fast_mode == FastMode::On) out << '\n';
    }
  }

  for (std::size_t i = 0; i < summary.episodes.size(); ++i) print_episode(out, i, summary.episodes[i]);
  const auto scores = scores_of(summary.episodes);
  summary.mean = mean_of(scores);
  summary.median = median_of(scores);
  out << "mean score: " << fixed1(summary.mean) << " | median score: " << fixed1(summary.median) << '\n';
  return summary;
}

std::filesystem::path episode_path(const std::filesystem::path& base, int index) {
  std::filesystem::path p = base;
  p.replace_filename(base.stem().string() + "_" + std::to_string(index) + base.extension().string());
  return p;
}

std::vector<std::filesystem::path> run_dataset(const RunConfig& config, const CliArgs& args, std::ostream& out,
                                               std::ostream& err) {
  const Session session = make_session(config, args, err);
  ObservationKeySet keys = args.keys_to_save;
  if (args.language_mode) keys.insert(ObsKey::Language);
  if (keys.empty()) throw KeyMismatch("no observation keys to save");

  const std::filesystem::path base(args.filename);
  if (base.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(base.parent_path(), ec);
    if (ec) throw IoError("cannot create " + base.parent_path().string() + ": " + ec.message());
  }

  std::vector<std::filesystem::path> written;
  std::vector<EpisodeStats> history;
  for (int i = 0; i < config.attempts; ++i) {
    const TaskSpec task = task_for(args.task, args.seed + static_cast<std::uint64_t>(i));
    AgentConfig agent = session.agent;
    agent.on_step = turn_printer(config, history, out);
    RecordedEpisode rec = record_episode(task, session.registry, agent, keys, static_cast<std::uint64_t>(i));
    if (config.fast_mode == FastMode::On) out << '\n';
    const auto path = episode_path(base, i);
    save(rec.trajectory, path);
    out << "wrote " << path.string() << " (" << rec.trajectory.steps.size() << " steps)\n";
    history.push_back(rec.stats);
    written.push_back(path);
  }
  return written;
}

std::vector<TrajectoryRecord> load_dataset(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (std::filesystem::exists(path, ec)) {
    files.push_back(path);
  } else {
    throw IoError("dataset not found: " + path.string());
  }
  if (files.empty()) throw EmptyDataset("no trajectory files in " + path.string());
  std::vector<TrajectoryRecord> out;
  for (const auto& f : files) out.push_back(load(f));
  return out;
}

TrainResult run_training(const RunConfig&, const CliArgs& args, std::ostream& out, std::ostream& err) {
  const TrainerRegistry trainers = default_trainers();
  const Trainer& trainer = trainers.resolve(args.training_alg);
  if (args.cuda) err << "warning: --cuda requested but no GPU backend exists; training on the CPU\n";
  const auto dataset = load_dataset(args.dataset);
  TrainResult result = trainer.train(dataset, args.train_config());
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    out << "epoch " << e + 1 << " loss " << result.epoch_loss[e] << '\n';
  }
  const std::filesystem::path ckpt(args.checkpoint.empty() ? "policy.merapol" : args.checkpoint);
  save_model(result.model, ckpt);
  out << "checkpoint written to " << ckpt.string() << '\n';
  return result;
}

int run_cli(std::span<const std::string> argv, std::ostream& out, std::ostream& err) {
  std::optional<CliArgs> args;
  try {
    args = parse_cli(argv, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }
  if (!args) return 0;
  try {
    switch (args->mode) {
      case RunMode::Inference:
        run_inference(load_config(args->config), *args, out, err);
        break;
      case RunMode::CreateDataset:
        run_dataset(load_config(args->config), *args, out, err);
        break;
      case RunMode::Training: {
        RunConfig cfg;
        if (std::filesystem::exists(args->config)) cfg = load_config(args->config);
        run_training(cfg, *args, out, err);
        break;
      }
    }
  } catch (const UnknownSkillName& e) {
    err << "error: unknown skill name: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mera
