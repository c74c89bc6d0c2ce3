#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mera/agent.hpp"

namespace mera {

/// The default full-game priority order.
PriorityList default_priorities();

/// Priority order used for single-room goal tasks.
PriorityList room_priorities();

/// Names of every built-in skill except the policy-backed ones.
std::span<const std::string_view> builtin_skill_names();

/// A built-in skill by name. Throws UnknownSkill.
std::shared_ptr<const Skill> make_builtin_skill(std::string_view name);

/// A distribution over a fixed list of moves, computed from the state.
class MovePolicy {
 public:
  virtual ~MovePolicy() = default;
  virtual std::span<const Action> actions() const = 0;
  virtual ObservationKeySet required_keys() const { return {ObsKey::Glyphs, ObsKey::Blstats}; }
  /// One probability per entry of actions(); sums to 1.
  virtual std::vector<double> distribution(const GameState& state) const = 0;
};

enum class SampleMode : std::uint8_t { Argmax, Sample };

/// Skill that takes one action from a move policy. Always plannable while
/// a policy is attached.
class PolicyWalk final : public Skill {
 public:
  PolicyWalk(std::string name, std::shared_ptr<const MovePolicy> policy, SampleMode mode);
  std::string_view name() const override { return name_; }
  ObservationKeySet required_keys() const override;
  std::optional<Plan> plan(const GameState& state, const PlanContext& ctx) const override;
  Outcome execute(const Plan& plan, EpisodeHandle& handle) const override;

 private:
  std::string name_;
  std::shared_ptr<const MovePolicy> policy_;
  SampleMode mode_;
};

/// Index chosen from a distribution: argmax (first maximum) or a draw.
std::size_t choose_index(std::span<const double> dist, SampleMode mode, Rng& rng);

/// Registry holding every built-in skill, plus BCWalk and NeuralWalk when
/// policies are given.
SkillRegistry default_registry(std::shared_ptr<const MovePolicy> bc_policy = nullptr,
                               std::shared_ptr<const MovePolicy> neural_policy = nullptr,
                               SampleMode mode = SampleMode::Argmax);

/// Plans a skill from the default registry. Throws UnknownSkill.
std::optional<Plan> plan_skill(std::string_view name, const GameState& state, const PlanContext& ctx = {});
std::optional<Plan> plan_skill(const SkillRegistry& registry, std::string_view name, const GameState& state,
                               const PlanContext& ctx = {});

/// Runs a plan with the named skill from `registry`.
Outcome execute_skill(const SkillRegistry& registry, const Plan& plan, EpisodeHandle& handle);

/// The move that maximises the minimum octile distance to every visible
/// threatening monster; ties go to the earlier compass direction. Throws
/// NoLegalMove when boxed in.
Action flee_step(const GameState& state, const ActionSet& legal = ActionSet::all());

}  // namespace mera
