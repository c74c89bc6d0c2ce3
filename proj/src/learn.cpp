#include "mera/learn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mera/error.hpp"

namespace mera {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

int glyph_class(Glyph g) {
  if (g == glyph::kBlank) return 0;
  if (glyph::is_terrain(g)) {
    switch (glyph::terrain_kind(g)) {
      case CellKind::Floor: return 1;
      case CellKind::Wall: return 2;
      case CellKind::Stone: return 3;
      case CellKind::Corridor: return 4;
      case CellKind::DoorClosed: return 5;
      case CellKind::DoorOpen: return 6;
      case CellKind::DoorLocked: return 7;
      case CellKind::StairsDown: return 8;
      case CellKind::StairsUp: return 9;
      default: return 0;
    }
  }
  if (glyph::is_monster(g)) {
    const int sp = glyph::monster_species(g);
    if (sp >= static_cast<int>(species_table().size())) return 15;
    return species(sp).passive ? 16 : 15;
  }
  switch (g) {
    case glyph::kAgent: return 10;
    case glyph::kFood: return 11;
    case glyph::kGold: return 12;
    case glyph::kKey: return 13;
    case glyph::kPet: return 14;
    default: return 0;
  }
}

FeatureVector featurize(const Observation& obs) {
  FeatureVector f(kFeatureSize, 0.0);
  const Cell center = obs.blstats.pos;
  constexpr int half = kCropSize / 2;
  int slot = 0;
  for (int dr = -half; dr <= half; ++dr) {
    for (int dc = -half; dc <= half; ++dc, ++slot) {
      const Cell c = center + Cell{dr, dc};
      const int cls = obs.glyphs.contains(c) ? glyph_class(obs.glyphs[c]) : kOutOfBoundsClass;
      f[static_cast<std::size_t>(slot * kGlyphClasses + cls)] = 1.0;
    }
  }
  const BlStats& b = obs.blstats;
  const std::size_t tail = kCropSize * kCropSize * kGlyphClasses;
  f[tail] = b.max_hp > 0 ? std::clamp(static_cast<double>(b.hp) / b.max_hp, 0.0, 1.0) : 0.0;
  f[tail + 1] = static_cast<double>(b.hunger) / 4.0;
  f[tail + 2] = std::clamp(b.depth / 10.0, 0.0, 1.0);
  return f;
}

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

PolicyModel PolicyModel::zeros(std::vector<Action> actions, int features) {
  PolicyModel m;
  m.action_space = std::move(actions);
  m.features = features;
  m.weights.assign(m.action_space.size() * static_cast<std::size_t>(features), 0.0);
  m.bias.assign(m.action_space.size(), 0.0);
  return m;
}

PolicyModel move_policy_zeros() { return PolicyModel::zeros({kMoves.begin(), kMoves.end()}); }

int PolicyModel::index_of(Action a) const {
  const auto it = std::find(action_space.begin(), action_space.end(), a);
  if (it == action_space.end()) throw ActionOutOfSpace("action " + std::string(action_name(a)) + " not in the policy's action space");
  return static_cast<int>(it - action_space.begin());
}

namespace {

void check_size(const PolicyModel& m, std::size_t n) {
  if (static_cast<int>(n) != m.features) {
    throw DimensionMismatch("feature vector has " + std::to_string(n) + " entries, model expects " +
                            std::to_string(m.features));
  }
}

template <class T>
void softmax_inplace(std::vector<T>& z) {
  const T mx = *std::max_element(z.begin(), z.end());
  T sum = 0;
  for (T& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (T& v : z) v /= sum;
}

std::vector<double> logits(const PolicyModel& m, std::span<const double> f) {
  std::vector<double> z(m.bias);
  for (int a = 0; a < m.actions(); ++a) {
    const double* row = m.weights.data() + static_cast<std::size_t>(a) * m.features;
    double s = 0.0;
    for (int i = 0; i < m.features; ++i) {
      if (f[i] != 0.0) s += row[i] * f[i];
    }
    z[a] += s;
  }
  return z;
}

// Sparse view of a feature vector: (index, value) of non-zero entries.
using Sparse = std::vector<std::pair<int, double>>;

Sparse sparse(std::span<const double> f) {
  Sparse out;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    if (f[i] != 0.0) out.emplace_back(i, f[i]);
  }
  return out;
}

std::vector<double> sparse_probs(const PolicyModel& m, const Sparse& f) {
  std::vector<double> z(m.bias);
  for (int a = 0; a < m.actions(); ++a) {
    const double* row = m.weights.data() + static_cast<std::size_t>(a) * m.features;
    for (const auto& [i, v] : f) z[a] += row[i] * v;
  }
  softmax_inplace(z);
  return z;
}

long double ce_from_logits(std::vector<long double> z, int target) {
  const long double mx = *std::max_element(z.begin(), z.end());
  long double sum = 0;
  for (long double v : z) sum += std::exp(v - mx);
  return std::log(sum) + mx - z[target];
}

}  // namespace

std::vector<double> policy_forward(const PolicyModel& model, std::span<const double> f) {
  check_size(model, f.size());
  std::vector<double> z = logits(model, f);
  softmax_inplace(z);
  return z;
}

double cross_entropy(const PolicyModel& model, std::span<const double> f, int target) {
  check_size(model, f.size());
  const std::vector<double> z = logits(model, f);
  return static_cast<double>(ce_from_logits({z.begin(), z.end()}, target));
}

Gradient loss_gradient(const PolicyModel& model, std::span<const double> f, int target) {
  const std::vector<double> p = policy_forward(model, f);
  Gradient g;
  g.weights.assign(model.weights.size(), 0.0);
  g.bias.assign(model.bias.size(), 0.0);
  for (int a = 0; a < model.actions(); ++a) {
    const double d = p[a] - (a == target ? 1.0 : 0.0);
    g.bias[a] = d;
    double* row = g.weights.data() + static_cast<std::size_t>(a) * model.features;
    for (int i = 0; i < model.features; ++i) row[i] = d * f[i];
  }
  return g;
}

double gradient_check(const PolicyModel& model, std::span<const double> f, Action target_action, double h) {
  check_size(model, f.size());
  const int target = model.index_of(target_action);
  const Gradient g = loss_gradient(model, f, target);

  // Base logits in extended precision; each parameter only moves one logit.
  std::vector<long double> z(model.bias.begin(), model.bias.end());
  for (int a = 0; a < model.actions(); ++a) {
    for (int i = 0; i < model.features; ++i) {
      z[a] += static_cast<long double>(model.w(a, i)) * f[i];
    }
  }
  const long double step = h;
  auto numeric = [&](int a, long double dz) {
    std::vector<long double> up = z;
    std::vector<long double> down = z;
    up[a] += dz;
    down[a] -= dz;
    return static_cast<double>((ce_from_logits(up, target) - ce_from_logits(down, target)) / (2 * step));
  };
  auto rel = [](double analytic, double approx) {
    const double denom = std::max({std::abs(analytic), std::abs(approx), 1e-8});
    return std::abs(analytic - approx) / denom;
  };
  double worst = 0.0;
  for (int a = 0; a < model.actions(); ++a) {
    worst = std::max(worst, rel(g.bias[a], numeric(a, step)));
    for (int i = 0; i < model.features; ++i) {
      const double n = f[i] == 0.0 ? 0.0 : numeric(a, step * f[i]);
      worst = std::max(worst, rel(g.weights[static_cast<std::size_t>(a) * model.features + i], n));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Behavioural cloning
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (!(scheduler_gamma > 0.0 && scheduler_gamma <= 1.0)) throw InvalidArgument("scheduler_gamma must be in (0, 1]");
}

double TrainConfig::rate_at(int epoch) const { return learning_rate * std::pow(scheduler_gamma, epoch - 1); }

std::vector<Sample> collect_samples(std::span<const TrajectoryRecord> dataset, std::span<const Action> action_space) {
  std::vector<Sample> out;
  for (const auto& traj : dataset) {
    for (const auto& step : traj.steps) {
      const auto it = std::find(action_space.begin(), action_space.end(), step.action);
      if (it == action_space.end()) {
        throw ActionOutOfSpace("dataset action " + std::string(action_name(step.action)) + " is outside the policy's action space");
      }
      out.push_back({featurize(step_observation(step)), static_cast<int>(it - action_space.begin())});
    }
  }
  return out;
}

TrainResult bc_train_samples(PolicyModel model, std::span<const Sample> samples, const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw EmptyDataset("no training samples");
  std::vector<Sparse> feats;
  feats.reserve(samples.size());
  for (const auto& s : samples) {
    check_size(model, s.features.size());
    if (s.action < 0 || s.action >= model.actions()) throw ActionOutOfSpace("sample label out of range");
    feats.push_back(sparse(s.features));
  }

  TrainResult result;
  Rng rng(mix_seed(config.seed, 0xBC));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const int A = model.actions();
  std::vector<double> gb(static_cast<std::size_t>(A));
  Gradient grad;
  grad.weights.assign(model.weights.size(), 0.0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
    }
    const double lr = config.rate_at(epoch);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(gb.begin(), gb.end(), 0.0);
      std::vector<std::pair<std::size_t, std::vector<double>>> deltas;
      deltas.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t s = order[k];
        std::vector<double> p = sparse_probs(model, feats[s]);
        const int y = samples[s].action;
        loss_sum += -std::log(std::max(p[y], 1e-300));
        p[y] -= 1.0;
        for (int a = 0; a < A; ++a) gb[a] += p[a] * scale;
        deltas.emplace_back(s, std::move(p));
      }
      // Apply after the whole batch has been evaluated.
      for (const auto& [s, d] : deltas) {
        for (int a = 0; a < A; ++a) {
          double* row = model.weights.data() + static_cast<std::size_t>(a) * model.features;
          const double c = lr * d[a] * scale;
          for (const auto& [i, v] : feats[s]) row[i] -= c * v;
        }
      }
      for (int a = 0; a < A; ++a) model.bias[a] -= lr * gb[a];
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(samples.size()));
  }
  result.model = std::move(model);
  return result;
}

TrainResult bc_train_samples(std::span<const Sample> samples, const TrainConfig& config,
                             std::span<const Action> action_space) {
  return bc_train_samples(PolicyModel::zeros({action_space.begin(), action_space.end()}), samples, config);
}

TrainResult bc_train(std::span<const TrajectoryRecord> dataset, const TrainConfig& config,
                     std::span<const Action> action_space) {
  config.validate();
  const std::vector<Sample> samples = collect_samples(dataset, action_space);
  if (samples.empty()) throw EmptyDataset("dataset has no steps");
  return bc_train_samples(samples, config, action_space);
}

TrainResult bc_train_rounds(const DatasetSource& source, const TrainConfig& config, int rounds,
                            const std::function<bool(const TrainResult&)>& stop, std::span<const Action> action_space) {
  TrainResult result;
  result.model = PolicyModel::zeros({action_space.begin(), action_space.end()});
  for (int round = 0; round < rounds; ++round) {
    const auto dataset = source(round, result.model);
    const auto samples = collect_samples(dataset, action_space);
    TrainResult next = bc_train_samples(result.model, samples, config);
    result.model = std::move(next.model);
    result.epoch_loss.insert(result.epoch_loss.end(), next.epoch_loss.begin(), next.epoch_loss.end());
    if (stop && stop(result)) break;
  }
  return result;
}

double mean_loss(const PolicyModel& model, std::span<const Sample> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) sum += cross_entropy(model, s.features, s.action);
  return sum / static_cast<double>(samples.size());
}

double accuracy(const PolicyModel& model, std::span<const Sample> samples) {
  if (samples.empty()) return 0.0;
  int hits = 0;
  for (const auto& s : samples) {
    const auto p = policy_forward(model, s.features);
    hits += static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) == s.action;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

namespace {

void write_number(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

std::vector<double> parse_numbers(const std::string& line, std::size_t expected, std::size_t line_no) {
  std::vector<double> out;
  out.reserve(expected);
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc{}) throw FormatError(line_no, "bad number");
    out.push_back(v);
    p = res.ptr;
  }
  if (out.size() != expected) {
    throw FormatError(line_no, "expected " + std::to_string(expected) + " numbers, found " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace

void save_model(const PolicyModel& model, std::ostream& out) {
  out << "merapol-1\n";
  out << "actions";
  for (Action a : model.action_space) out << ' ' << action_name(a);
  out << "\nfeatures " << model.features << '\n';
  for (int a = 0; a < model.actions(); ++a) {
    for (int i = 0; i < model.features; ++i) {
      if (i) out << ' ';
      write_number(out, model.w(a, i));
    }
    out << '\n';
  }
  for (int a = 0; a < model.actions(); ++a) {
    if (a) out << ' ';
    write_number(out, model.bias[a]);
  }
  out << '\n';
}

void save_model(const PolicyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(model, out);
  if (!out) throw IoError("write failed: " + path.string());
}

PolicyModel load_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::string& {
    ++line_no;
    if (!std::getline(in, line)) throw FormatError(line_no, "unexpected end of file");
    return line;
  };
  if (next() != "merapol-1") throw FormatError(line_no, "not a merapol-1 checkpoint");

  std::istringstream acts(next());
  std::string word;
  acts >> word;
  if (word != "actions") throw FormatError(line_no, "expected actions");
  std::vector<Action> actions;
  while (acts >> word) {
    const auto a = parse_action(word);
    if (!a) throw FormatError(line_no, "unknown action " + word);
    actions.push_back(*a);
  }
  if (actions.empty()) throw FormatError(line_no, "empty action space");

  std::istringstream feat(next());
  int features = 0;
  if (!(feat >> word >> features) || word != "features" || features < 1) throw FormatError(line_no, "expected features");

  PolicyModel m = PolicyModel::zeros(actions, features);
  for (int a = 0; a < m.actions(); ++a) {
    const auto row = parse_numbers(next(), static_cast<std::size_t>(features), line_no);
    std::copy(row.begin(), row.end(), m.weights.begin() + static_cast<std::ptrdiff_t>(a) * features);
  }
  m.bias = parse_numbers(next(), actions.size(), line_no);
  for (double v : m.weights) {
    if (!std::isfinite(v)) throw FormatError(line_no, "non-finite weight");
  }
  return m;
}

PolicyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return load_model(in);
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

Rule do_not_hit_stone() {
  return {std::string(kDoNotHitStone),
          [](const GameState& s, Action a) {
            if (!is_move(a)) return false;
            const Cell c = s.agent + move_delta(a);
            if (!s.extent().contains(c)) return true;
            const auto k = s.known(c);
            return k == CellKind::Stone || k == CellKind::Wall;
          },
          RuleEffect::Mask, 1.0};
}

Rule attack_enemies(double beta) {
  return {"attack_enemies",
          [](const GameState& s, Action a) {
            if (!is_move(a)) return false;
            const EntityView* e = s.entity_at(s.agent + move_delta(a));
            return e && e->threatening();
          },
          RuleEffect::Boost, beta};
}

Rule move_to_key(double beta) {
  return {"move_to_key",
          [](const GameState& s, Action a) {
            if (!is_move(a)) return false;
            const Cell next = s.agent + move_delta(a);
            for (const auto& e : s.entities) {
              if (e.cls == EntityClass::Key && octile(next, e.pos) < octile(s.agent, e.pos)) return true;
            }
            return false;
          },
          RuleEffect::Boost, beta};
}

Rule do_not_repeat_action() {
  return {"do_not_repeat_action", [](const GameState& s, Action a) { return s.last_action == a; }, RuleEffect::Mask,
          1.0};
}

RuleSet default_rules(double beta) {
  return {do_not_hit_stone(), attack_enemies(beta), move_to_key(beta), do_not_repeat_action()};
}

std::vector<double> apply_rules(const GameState& state, std::span<const double> dist, std::span<const Action> actions,
                                const RuleSet& rules) {
  if (dist.size() != actions.size()) throw DimensionMismatch("distribution and action list differ in length");
  std::vector<double> out(dist.begin(), dist.end());
  std::vector<bool> stone_masked(actions.size(), false);
  for (const auto& rule : rules) {
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (!rule.condition(state, actions[i])) continue;
      if (rule.effect == RuleEffect::Mask) {
        out[i] = 0.0;
        if (rule.name == kDoNotHitStone) stone_masked[i] = true;
      } else {
        out[i] *= rule.beta;
      }
    }
  }
  double sum = std::accumulate(out.begin(), out.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : out) v /= sum;
    return out;
  }
  const auto open = static_cast<std::size_t>(std::count(stone_masked.begin(), stone_masked.end(), false));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (open == 0) {
      out[i] = 1.0 / static_cast<double>(out.size());
    } else {
      out[i] = stone_masked[i] ? 0.0 : 1.0 / static_cast<double>(open);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Policies and evaluation
// ---------------------------------------------------------------------------

std::vector<double> ModelPolicy::distribution(const GameState& state) const {
  Observation obs = state.current_obs;
  obs.blstats.pos = state.agent;
  return policy_forward(model_, featurize(obs));
}

std::vector<double> RuledPolicy::distribution(const GameState& state) const {
  return apply_rules(state, inner_->distribution(state), inner_->actions(), rules_);
}

std::vector<double> UniformPolicy::distribution(const GameState&) const {
  return std::vector<double>(kMoves.size(), 1.0 / kMoves.size());
}

std::vector<double> EpsilonGreedyPolicy::distribution(const GameState& s) const {
  std::vector<double> out(kMoves.size(), epsilon_ / kMoves.size());
  std::optional<Cell> target;
  if (s.stairs_down_pos && s.visible.contains(*s.stairs_down_pos) && s.visible[*s.stairs_down_pos]) {
    target = s.stairs_down_pos;
  } else {
    const Extent ext = s.extent();
    for (int r = 0; r < ext.rows; ++r) {
      for (int c = 0; c < ext.cols; ++c) {
        const Cell cell{r, c};
        if (!s.visible[cell] || cell == s.agent) continue;
        const auto k = s.known(cell);
        if (!k || !is_door(*k)) continue;
        if (!target || octile(s.agent, cell) < octile(s.agent, *target)) target = cell;
      }
    }
  }
  if (!target || *target == s.agent) return std::vector<double>(kMoves.size(), 1.0 / kMoves.size());
  const Cell d = *target - s.agent;
  const Cell step{(d.row > 0) - (d.row < 0), (d.col > 0) - (d.col < 0)};
  const Action greedy = *move_toward_adjacent(s.agent, s.agent + step);
  out[static_cast<std::size_t>(greedy)] += 1.0 - epsilon_;
  return out;
}

EvalResult evaluate(std::shared_ptr<const MovePolicy> policy, const TaskSpec& task, int n, const RuleSet* rules,
                    SampleMode mode) {
  if (n < 1) throw InvalidArgument("evaluate needs at least one episode");
  if (rules) policy = std::make_shared<RuledPolicy>(std::move(policy), *rules);
  const SkillRegistry registry = default_registry(policy, nullptr, mode);
  AgentConfig config;
  config.priorities = {"BCWalk"};
  EvalResult r;
  r.episodes = n;
  double steps = 0.0;
  double score = 0.0;
  for (int i = 0; i < n; ++i) {
    TaskSpec t = task;
    t.seed = task.seed + static_cast<std::uint64_t>(i);
    Env env;
    const Observation first = env.reset(t);
    const EpisodeStats st = run_episode(env, first, registry, config, t.max_steps);
    r.successes += st.end == EpisodeEnd::Goal;
    steps += st.actions;
    score += st.score;
  }
  r.success_rate = static_cast<double>(r.successes) / n;
  r.mean_steps = steps / n;
  r.mean_score = score / n;
  return r;
}

EvalResult evaluate(const PolicyModel& model, const TaskSpec& task, int n, const RuleSet* rules, SampleMode mode) {
  return evaluate(std::make_shared<ModelPolicy>(model), task, n, rules, mode);
}

// ---------------------------------------------------------------------------
// Recording
// ---------------------------------------------------------------------------

RecordedEpisode record_episode(const TaskSpec& task, const SkillRegistry& registry, const AgentConfig& config,
                               ObservationKeySet keys, std::uint64_t episode_id) {
  RecordedEpisode out;
  out.trajectory = make_trajectory(episode_id, task.seed, keys);
  Env env;
  const Observation first = env.reset(task);
  Observation prev = first;
  AgentConfig cfg = config;
  cfg.on_step = [&](const StepEvent& ev) {
    if (ev.result.observation.blstats.turn > prev.blstats.turn) {
      record_step(out.trajectory, prev, ev.before, ev.action, keys);
    }
    prev = ev.result.observation;
    if (config.on_step) config.on_step(ev);
  };
  out.stats = run_episode(env, first, registry, cfg, task.max_steps);
  return out;
}

std::vector<TrajectoryRecord> record_dataset(const TaskSpec& task, int n, const SkillRegistry& registry,
                                             const AgentConfig& config, ObservationKeySet keys) {
  std::vector<TrajectoryRecord> out;
  for (int i = 0; i < n; ++i) {
    TaskSpec t = task;
    t.seed = task.seed + static_cast<std::uint64_t>(i);
    out.push_back(record_episode(t, registry, config, keys, static_cast<std::uint64_t>(i)).trajectory);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trainers
// ---------------------------------------------------------------------------

namespace {

class BcTrainer final : public Trainer {
 public:
  std::string_view name() const override { return "bc"; }
  // Move-only datasets train a move policy; anything else uses every action.
  TrainResult train(std::span<const TrajectoryRecord> dataset, const TrainConfig& config) const override {
    for (const auto& traj : dataset) {
      for (const auto& step : traj.steps) {
        if (!is_move(step.action)) return bc_train(dataset, config, kAllActions);
      }
    }
    return bc_train(dataset, config, kMoves);
  }
};

}  // namespace

void TrainerRegistry::register_trainer(std::shared_ptr<const Trainer> trainer) {
  std::string name(trainer->name());
  if (trainers_.contains(name)) throw DuplicateName("trainer already registered: " + name);
  trainers_.emplace(std::move(name), std::move(trainer));
}

const Trainer& TrainerRegistry::resolve(std::string_view name) const {
  const auto it = trainers_.find(name);
  if (it == trainers_.end()) throw UnknownTrainer("unknown training algorithm: " + std::string(name));
  return *it->second;
}

std::vector<std::string> TrainerRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, _] : trainers_) out.push_back(n);
  return out;
}

TrainerRegistry default_trainers() {
  TrainerRegistry r;
  r.register_trainer(std::make_shared<BcTrainer>());
  return r;
}

}  // namespace mera
