#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mera/skills.hpp"
#include "mera/traj.hpp"

namespace mera {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

inline constexpr int kCropSize = 9;
inline constexpr int kGlyphClasses = 18;
inline constexpr int kOutOfBoundsClass = kGlyphClasses - 1;
inline constexpr int kFeatureSize = kCropSize * kCropSize * kGlyphClasses + 3;

using FeatureVector = std::vector<double>;

/// Class of a glyph in the feature crop: 0 blank, 1-9 terrain, 10 agent,
/// 11 food, 12 gold, 13 key, 14 pet, 15 hostile, 16 passive monster.
int glyph_class(Glyph g);

/// One-hot crop centred on the agent, then hp ratio, hunger/4, depth/10.
FeatureVector featurize(const Observation& obs);

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

/// Linear softmax policy: p = softmax(W f + b).
struct PolicyModel {
  std::vector<Action> action_space;
  int features = kFeatureSize;
  std::vector<double> weights;  ///< row-major [actions x features]
  std::vector<double> bias;

  static PolicyModel zeros(std::vector<Action> actions, int features = kFeatureSize);
  int actions() const { return static_cast<int>(action_space.size()); }
  double& w(int a, int f) { return weights[static_cast<std::size_t>(a) * features + f]; }
  double w(int a, int f) const { return weights[static_cast<std::size_t>(a) * features + f]; }
  /// Position of `a` in the action space. Throws ActionOutOfSpace.
  int index_of(Action a) const;

  friend bool operator==(const PolicyModel&, const PolicyModel&) = default;
};

PolicyModel move_policy_zeros();

/// Throws DimensionMismatch when f has the wrong length.
std::vector<double> policy_forward(const PolicyModel& model, std::span<const double> f);

/// -log p(target | f).
double cross_entropy(const PolicyModel& model, std::span<const double> f, int target);

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Analytic gradient of the cross-entropy at one sample.
Gradient loss_gradient(const PolicyModel& model, std::span<const double> f, int target);

/// Max relative error between the analytic gradient and central finite
/// differences with step `h`, over every parameter.
double gradient_check(const PolicyModel& model, std::span<const double> f, Action target, double h = 1e-5);

// ---------------------------------------------------------------------------
// Behavioural cloning
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 5;
  int batch_size = 32;
  double learning_rate = 0.5;
  double scheduler_gamma = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument.
  void validate() const;
  /// Step size used during epoch e (1-based).
  double rate_at(int epoch) const;
};

struct Sample {
  FeatureVector features;
  int action = 0;
};

/// Feature/label pairs from every step. Throws MissingKeys or ActionOutOfSpace.
std::vector<Sample> collect_samples(std::span<const TrajectoryRecord> dataset, std::span<const Action> action_space);

struct TrainResult {
  PolicyModel model;
  std::vector<double> epoch_loss;  ///< mean loss over each epoch's batches
};

/// Plain mini-batch gradient descent on mean cross-entropy from a zero model.
/// Throws EmptyDataset, MissingKeys, ActionOutOfSpace.
TrainResult bc_train(std::span<const TrajectoryRecord> dataset, const TrainConfig& config,
                     std::span<const Action> action_space = kMoves);
TrainResult bc_train_samples(std::span<const Sample> samples, const TrainConfig& config,
                             std::span<const Action> action_space = kMoves);
/// Continues training an existing model.
TrainResult bc_train_samples(PolicyModel start, std::span<const Sample> samples, const TrainConfig& config);

/// Collects a fresh dataset each round from the current model and keeps
/// training until `rounds` rounds are done or `stop` returns true.
using DatasetSource = std::function<std::vector<TrajectoryRecord>(int round, const PolicyModel& current)>;
TrainResult bc_train_rounds(const DatasetSource& source, const TrainConfig& config, int rounds,
                            const std::function<bool(const TrainResult&)>& stop = {},
                            std::span<const Action> action_space = kMoves);

double mean_loss(const PolicyModel& model, std::span<const Sample> samples);
double accuracy(const PolicyModel& model, std::span<const Sample> samples);

void save_model(const PolicyModel& model, std::ostream& out);
void save_model(const PolicyModel& model, const std::filesystem::path& path);
/// Throws FormatError or IoError.
PolicyModel load_model(std::istream& in);
PolicyModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

enum class RuleEffect : std::uint8_t { Mask, Boost };

struct Rule {
  std::string name;
  std::function<bool(const GameState&, Action)> condition;
  RuleEffect effect = RuleEffect::Mask;
  double beta = 2.0;  ///< Boost factor
};

using RuleSet = std::vector<Rule>;

inline constexpr std::string_view kDoNotHitStone = "do_not_hit_stone";

Rule do_not_hit_stone();
Rule attack_enemies(double beta = 2.0);
Rule move_to_key(double beta = 2.0);
Rule do_not_repeat_action();
/// The four default rules in order.
RuleSet default_rules(double beta = 2.0);

/// Masks and boosts `dist` (aligned with `actions`), then renormalises.
std::vector<double> apply_rules(const GameState& state, std::span<const double> dist, std::span<const Action> actions,
                                const RuleSet& rules);

// ---------------------------------------------------------------------------
// Policies and evaluation
// ---------------------------------------------------------------------------

class ModelPolicy final : public MovePolicy {
 public:
  explicit ModelPolicy(PolicyModel model) : model_(std::move(model)) {}
  std::span<const Action> actions() const override { return model_.action_space; }
  std::vector<double> distribution(const GameState& state) const override;
  const PolicyModel& model() const { return model_; }

 private:
  PolicyModel model_;
};

/// Applies a rule set on top of another policy.
class RuledPolicy final : public MovePolicy {
 public:
  RuledPolicy(std::shared_ptr<const MovePolicy> inner, RuleSet rules)
      : inner_(std::move(inner)), rules_(std::move(rules)) {}
  std::span<const Action> actions() const override { return inner_->actions(); }
  ObservationKeySet required_keys() const override { return inner_->required_keys(); }
  std::vector<double> distribution(const GameState& state) const override;

 private:
  std::shared_ptr<const MovePolicy> inner_;
  RuleSet rules_;
};

/// Fixed mediocre scripted policy: with probability 1 - epsilon heads for
/// the visible down staircase, else the nearest visible door; uniform
/// otherwise.
class EpsilonGreedyPolicy final : public MovePolicy {
 public:
  explicit EpsilonGreedyPolicy(double epsilon) : epsilon_(epsilon) {}
  std::span<const Action> actions() const override { return kMoves; }
  std::vector<double> distribution(const GameState& state) const override;

 private:
  double epsilon_;
};

/// Uniform over the eight moves.
class UniformPolicy final : public MovePolicy {
 public:
  std::span<const Action> actions() const override { return kMoves; }
  ObservationKeySet required_keys() const override { return {}; }
  std::vector<double> distribution(const GameState&) const override;
};

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double mean_score = 0.0;
};

/// Plays `n` episodes of `task` on seeds task.seed .. task.seed + n - 1
/// with the policy as the only skill. Success means reaching the goal.
EvalResult evaluate(std::shared_ptr<const MovePolicy> policy, const TaskSpec& task, int n,
                    const RuleSet* rules = nullptr, SampleMode mode = SampleMode::Argmax);
EvalResult evaluate(const PolicyModel& model, const TaskSpec& task, int n, const RuleSet* rules = nullptr,
                    SampleMode mode = SampleMode::Argmax);

// ---------------------------------------------------------------------------
// Recording
// ---------------------------------------------------------------------------

struct RecordedEpisode {
  EpisodeStats stats;
  TrajectoryRecord trajectory;
};

/// Plays one episode with the agent and records every turn-consuming step
/// with the given keys. Actions that take no game time are not recorded.
RecordedEpisode record_episode(const TaskSpec& task, const SkillRegistry& registry, const AgentConfig& config,
                               ObservationKeySet keys, std::uint64_t episode_id);

/// Expert trajectories on seeds task.seed .. task.seed + n - 1.
std::vector<TrajectoryRecord> record_dataset(const TaskSpec& task, int n, const SkillRegistry& registry,
                                             const AgentConfig& config, ObservationKeySet keys);

// ---------------------------------------------------------------------------
// Trainers
// ---------------------------------------------------------------------------

class Trainer {
 public:
  virtual ~Trainer() = default;
  virtual std::string_view name() const = 0;
  virtual TrainResult train(std::span<const TrajectoryRecord> dataset, const TrainConfig& config) const = 0;
};

class TrainerRegistry {
 public:
  void register_trainer(std::shared_ptr<const Trainer> trainer);
  /// Throws UnknownTrainer.
  const Trainer& resolve(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const Trainer>, std::less<>> trainers_;
};

/// Registry with the built-in "bc" trainer.
TrainerRegistry default_trainers();

}  // namespace mera
