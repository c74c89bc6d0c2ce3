#include "mera/skills.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <numeric>

#include "mera/error.hpp"

namespace mera {

namespace {

using Validator = std::function<bool(const GameState&)>;

constexpr std::array<std::string_view, 15> kBuiltinNames = {
    "Pray",  "Eat",          "Elbereth",       "Run",     "Break",   "Fight",      "Gold",          "StairsDescend",
    "StairsAscend", "ExploreClosest", "Horizon", "Unseen", "HiddenRoom", "HiddenCorridor", "RandomWalk"};

bool hp_known(const GameState& s) { return s.has(ObsKey::Blstats) && s.blstats().max_hp > 0; }

std::vector<const EntityView*> threats(const GameState& s) {
  std::vector<const EntityView*> out;
  for (const auto& e : s.entities) {
    if (e.threatening()) out.push_back(&e);
  }
  return out;
}

bool occupied_by_monster(const GameState& s, Cell c) {
  const EntityView* e = s.entity_at(c);
  return e && e->cls == EntityClass::Monster;
}

bool frontier_cell(const GameState& s, Cell c) {
  if (!planning_walkable(s, c)) return false;
  for (Action a : kMoves) {
    const Cell n = c + move_delta(a);
    if (s.explored.contains(n) && !s.explored[n]) return true;
  }
  return false;
}

// The first door Open would act on, scanning in compass order.
std::optional<Cell> first_openable_door(const GameState& s) {
  for (Action a : kMoves) {
    const Cell c = s.agent + move_delta(a);
    const auto k = s.known(c);
    if (k == CellKind::DoorClosed || k == CellKind::DoorLocked) return c;
  }
  return std::nullopt;
}

Outcome stop(EpisodeHandle& h, bool at_end) {
  return h.finish(at_end ? OutcomeStatus::Completed : OutcomeStatus::Interrupted);
}

// Follows a path from its first cell. Returns an outcome when the walk
// ended early, nothing when the agent stands on the last cell.
std::optional<Outcome> walk(const Path& path, EpisodeHandle& h, const Validator& valid) {
  constexpr int kTries = 4;
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    const Cell next = path.cells[i];
    const bool last = i + 1 == path.cells.size();
    int tries = 0;
    while (h.state().agent != next) {
      const GameState& s = h.state();
      if (valid && !valid(s)) return h.finish(OutcomeStatus::Failed);
      if (!adjacent8(s.agent, next) || ++tries > kTries) return h.finish(OutcomeStatus::Failed);
      if (s.known(next) == CellKind::DoorClosed && h.legal().contains(Action::Open) &&
          first_openable_door(s) == next) {
        if (!h.act(Action::Open)) return stop(h, false);
        continue;
      }
      const Action move = *move_toward_adjacent(s.agent, next);
      if (!h.legal().contains(move)) return h.finish(OutcomeStatus::Failed);
      if (!h.act(move)) return stop(h, last && h.state().agent == next);
    }
  }
  return std::nullopt;
}

bool submit(const PlanPayload& payload, EpisodeHandle& h) {
  if (const auto* a = std::get_if<Action>(&payload)) return h.act(*a);
  if (const auto* cmd = std::get_if<AtomicCommand>(&payload)) {
    for (const auto& step : expand_atomic(*cmd)) {
      if (!h.act(step.action, step.text)) return false;
    }
  }
  return true;
}

Outcome run_plan(const Plan& plan, EpisodeHandle& h, const Validator& valid) {
  if (plan.path) {
    if (auto early = walk(*plan.path, h, valid)) return *early;
  }
  if (valid && !valid(h.state())) return h.finish(OutcomeStatus::Failed);
  submit(plan.payload, h);
  return h.finish(OutcomeStatus::Completed);
}

Plan path_plan(const Target& t, PlanPayload payload = {}) {
  Plan p;
  p.target = t.cell;
  p.path = t.path;
  p.payload = payload;
  return p;
}

// An item target stays valid while its glyph is still there (or hidden by
// a creature), or while the agent stands on it and the item was reported.
Validator item_still_there(Cell target, Glyph item, EntityClass cls) {
  return [=](const GameState& s) {
    if (s.agent == target) return s.underfoot == cls;
    if (!s.visible[target]) return true;
    const Glyph g = s.current_obs.glyphs[target];
    return g == item || glyph::is_monster(g) || g == glyph::kPet;
  };
}

// Item targets: visible items plus the one under the agent.
std::vector<Cell> item_targets(const GameState& s, EntityClass cls) {
  std::vector<Cell> out = find_entities(s, cls);
  if (s.underfoot == cls) out.push_back(s.agent);
  return out;
}

// --- room structure for hidden-feature search ------------------------------

bool room_floor(const GameState& s, Cell c) {
  const auto k = s.known(c);
  return k == CellKind::Floor || k == CellKind::StairsDown || k == CellKind::StairsUp;
}

constexpr std::array<Cell, 4> kOrtho = {Cell{-1, 0}, Cell{0, 1}, Cell{1, 0}, Cell{0, -1}};

struct SearchSpot {
  Cell target;  // cell whose search count is capped
  Cell stand;   // where the agent searches from
};

std::vector<SearchSpot> dead_end_room_walls(const GameState& s, int cap) {
  std::vector<SearchSpot> out;
  const Extent ext = s.extent();
  Grid<int> region(ext, -1);
  int next_id = 0;
  for (int r = 0; r < ext.rows; ++r) {
    for (int c = 0; c < ext.cols; ++c) {
      const Cell start{r, c};
      if (region[start] >= 0 || !room_floor(s, start)) continue;
      const int id = next_id++;
      std::vector<Cell> cells{start};
      region[start] = id;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        for (Cell d : kOrtho) {
          const Cell n = cells[i] + d;
          if (ext.contains(n) && region[n] < 0 && room_floor(s, n)) {
            region[n] = id;
            cells.push_back(n);
          }
        }
      }
      std::vector<Cell> doors;
      std::vector<SearchSpot> walls;
      for (Cell f : cells) {
        for (Cell d : kOrtho) {
          const Cell n = f + d;
          const auto k = s.known(n);
          if (!k) continue;
          if (is_door(*k) || *k == CellKind::Corridor) {
            if (std::find(doors.begin(), doors.end(), n) == doors.end()) doors.push_back(n);
          } else if (*k == CellKind::Wall && ext.contains(n + d) && s.search_count[n] < cap) {
            walls.push_back({n, f});
          }
        }
      }
      if (doors.size() <= 1) out.insert(out.end(), walls.begin(), walls.end());
    }
  }
  return out;
}

std::vector<SearchSpot> dead_end_corridors(const GameState& s, int cap) {
  std::vector<SearchSpot> out;
  const Extent ext = s.extent();
  for (int r = 0; r < ext.rows; ++r) {
    for (int c = 0; c < ext.cols; ++c) {
      const Cell cell{r, c};
      if (s.known(cell) != CellKind::Corridor || s.search_count[cell] >= cap) continue;
      bool surrounded = true;
      for (Action a : kMoves) {
        const Cell n = cell + move_delta(a);
        if (ext.contains(n) && !s.explored[n]) surrounded = false;
      }
      if (!surrounded) continue;
      int exits = 0;
      for (Cell d : kOrtho) {
        if (planning_walkable(s, cell + d)) ++exits;
      }
      if (exits <= 1) out.push_back({cell, cell});
    }
  }
  return out;
}

std::optional<Plan> plan_search_spot(const GameState& s, const PlanContext& ctx,
                                     const std::vector<SearchSpot>& spots) {
  if (spots.empty() || !ctx.legal.contains(Action::Search) || !planning_walkable(s, s.agent)) return std::nullopt;
  const DistanceMap dist(s.extent(), planning_walkable(s), s.agent, ctx.metric);
  const SearchSpot* best = nullptr;
  for (const auto& spot : spots) {
    if (!dist.reachable(spot.stand)) continue;
    if (!best) {
      best = &spot;
      continue;
    }
    const double a = dist.cost(spot.stand);
    const double b = dist.cost(best->stand);
    if (a < b || (a == b && std::tie(spot.stand, spot.target) < std::tie(best->stand, best->target))) best = &spot;
  }
  if (!best) return std::nullopt;
  Plan p;
  p.target = best->target;
  p.path = dist.path_to(best->stand);
  p.payload = Action::Search;
  return p;
}

// Walks to the spot, then searches until the target's cap or a discovery.
Outcome run_search(const Plan& plan, EpisodeHandle& h, int cap) {
  if (plan.path) {
    if (auto early = walk(*plan.path, h, {})) return *early;
  }
  const Cell target = *plan.target;
  while (h.state().search_count[target] < cap) {
    if (!h.act(Action::Search)) break;
    const std::string& msg = h.state().current_obs.message;
    if (msg.find("You find a hidden") != std::string::npos) break;
  }
  return h.finish(OutcomeStatus::Completed);
}

// --- skills -----------------------------------------------------------------

class CatalogSkill : public Skill {
 public:
  CatalogSkill(std::string_view name, ObservationKeySet keys) : name_(name), keys_(keys) {}
  std::string_view name() const override { return name_; }
  ObservationKeySet required_keys() const override { return keys_; }

 private:
  std::string_view name_;
  ObservationKeySet keys_;
};

class PraySkill final : public CatalogSkill {
 public:
  PraySkill() : CatalogSkill("Pray", {ObsKey::Blstats}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!ctx.legal.contains(Action::Pray) || !hp_known(s)) return std::nullopt;
    const BlStats& b = s.blstats();
    const bool trouble = b.hp * ctx.params.pray_hp_divisor < b.max_hp || b.hunger >= Hunger::Weak;
    const bool ready = !b.last_prayer_turn || b.turn - *b.last_prayer_turn > ctx.params.prayer_timeout;
    if (!trouble || !ready) return std::nullopt;
    Plan p;
    p.payload = AtomicCommand{AtomicName::PrayConfirmed};
    return p;
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class EatSkill final : public CatalogSkill {
 public:
  EatSkill() : CatalogSkill("Eat", {ObsKey::Blstats, ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!ctx.legal.contains(Action::Eat) || !s.has(ObsKey::Blstats)) return std::nullopt;
    const Hunger h = s.blstats().hunger;
    if (h != Hunger::Hungry && h != Hunger::Weak && h != Hunger::Fainting) return std::nullopt;
    const auto targets = item_targets(s, EntityClass::Food);
    auto t = closest_reachable(s, targets, ctx.metric);
    if (!t) return std::nullopt;
    return path_plan(*t, AtomicCommand{AtomicName::EatNearest});
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override {
    return run_plan(plan, h, item_still_there(*plan.target, glyph::kFood, EntityClass::Food));
  }
};

class ElberethSkill final : public CatalogSkill {
 public:
  ElberethSkill() : CatalogSkill("Elbereth", {ObsKey::Blstats, ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!ctx.legal.contains(Action::Engrave) || !hp_known(s)) return std::nullopt;
    const ThreatSummary& t = s.threat;
    if (t.adjacent_hostiles < ctx.params.elbereth_min_adjacent &&
        !(t.adjacent_hostiles > 0 && t.strongest_adjacent_hp > s.blstats().hp)) {
      return std::nullopt;
    }
    Plan p;
    p.payload = AtomicCommand{AtomicName::EngraveElbereth};
    return p;
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class RunSkill final : public CatalogSkill {
 public:
  RunSkill() : CatalogSkill("Run", {ObsKey::Blstats, ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!hp_known(s)) return std::nullopt;
    const BlStats& b = s.blstats();
    if (b.hp * ctx.params.run_hp_divisor >= b.max_hp) return std::nullopt;
    const auto hs = threats(s);
    const bool close = std::any_of(hs.begin(), hs.end(), [&](const EntityView* e) {
      return chebyshev(e->pos, s.agent) <= ctx.params.run_radius;
    });
    if (!close) return std::nullopt;
    try {
      Plan p;
      p.payload = flee_step(s, ctx.legal);
      return p;
    } catch (const NoLegalMove&) {
      return std::nullopt;
    }
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class BreakSkill final : public CatalogSkill {
 public:
  BreakSkill() : CatalogSkill("Break", {ObsKey::Blstats, ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!ctx.legal.contains(Action::Search) || !hp_known(s)) return std::nullopt;
    const BlStats& b = s.blstats();
    if (b.hp >= ctx.params.rest_hp_fraction * b.max_hp || !threats(s).empty()) return std::nullopt;
    Plan p;
    p.payload = Action::Search;
    return p;
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class FightSkill final : public CatalogSkill {
 public:
  FightSkill() : CatalogSkill("Fight", {ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    for (const auto& e : s.entities) {
      if (!e.threatening() || !adjacent8(e.pos, s.agent)) continue;
      const Action a = *move_toward_adjacent(s.agent, e.pos);
      if (!ctx.legal.contains(a)) continue;
      Plan p;
      p.target = e.pos;
      p.payload = a;
      return p;
    }
    return std::nullopt;
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class GoldSkill final : public CatalogSkill {
 public:
  GoldSkill() : CatalogSkill("Gold", {ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    if (!ctx.legal.contains(Action::PickUp)) return std::nullopt;
    const auto targets = item_targets(s, EntityClass::Gold);
    auto t = closest_reachable(s, targets, ctx.metric);
    if (!t) return std::nullopt;
    return path_plan(*t, Action::PickUp);
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override {
    return run_plan(plan, h, item_still_there(*plan.target, glyph::kGold, EntityClass::Gold));
  }
};

class StairsSkill final : public CatalogSkill {
 public:
  explicit StairsSkill(bool down) : CatalogSkill(down ? "StairsDescend" : "StairsAscend", {ObsKey::Glyphs}), down_(down) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    const auto& pos = down_ ? s.stairs_down_pos : s.stairs_up_pos;
    if (!pos) return std::nullopt;
    const Action cmd = down_ ? Action::Descend : Action::Ascend;
    PlanPayload payload;
    if (ctx.legal.contains(cmd)) {
      payload = AtomicCommand{down_ ? AtomicName::DescendHere : AtomicName::AscendHere};
    } else if (!down_) {
      return std::nullopt;
    }
    if (!down_ && !ctx.ascent_active) return std::nullopt;
    const std::array<Cell, 1> targets = {*pos};
    auto t = closest_reachable(s, targets, ctx.metric);
    if (!t) return std::nullopt;
    return path_plan(*t, payload);
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }

 private:
  bool down_;
};

class ExploreClosestSkill final : public CatalogSkill {
 public:
  ExploreClosestSkill() : CatalogSkill("ExploreClosest", {ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    std::vector<Cell> targets;
    const Extent ext = s.extent();
    for (int r = 0; r < ext.rows; ++r) {
      for (int c = 0; c < ext.cols; ++c) {
        const Cell cell{r, c};
        const auto k = s.known(cell);
        if (!k || s.visited[cell]) continue;
        bool wanted = *k == CellKind::DoorOpen || *k == CellKind::DoorClosed || *k == CellKind::StairsDown ||
                      *k == CellKind::StairsUp;
        if (*k == CellKind::Corridor) {
          for (Cell d : kOrtho) {
            if (const auto n = s.known(cell + d); n && is_door(*n)) wanted = true;
          }
        }
        if (wanted) targets.push_back(cell);
      }
    }
    auto t = closest_reachable(s, targets, ctx.metric);
    if (!t) return std::nullopt;
    return path_plan(*t);
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override { return run_plan(plan, h, {}); }
};

class FrontierSkill final : public CatalogSkill {
 public:
  explicit FrontierSkill(bool farthest) : CatalogSkill(farthest ? "Horizon" : "Unseen", {ObsKey::Glyphs}), farthest_(farthest) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    std::vector<Cell> targets = frontier_targets(s);
    if (farthest_) {
      // Only what is in view right now: the current horizon.
      std::erase_if(targets, [&](Cell c) { return !s.visible[c] || c == s.agent; });
      auto t = farthest_reachable(s, targets, ctx.metric);
      if (!t) return std::nullopt;
      return path_plan(*t);
    }
    std::erase(targets, s.agent);
    auto t = closest_reachable(s, targets, ctx.metric);
    if (!t) return std::nullopt;
    return path_plan(*t);
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override {
    // Once the target has been seen around, there is no need to stand on it.
    const Cell target = *plan.target;
    Validator still_frontier = [target](const GameState& s) { return frontier_cell(s, target); };
    if (auto early = walk(*plan.path, h, still_frontier)) {
      if (early->status == OutcomeStatus::Failed && !frontier_cell(h.state(), target)) {
        return h.finish(OutcomeStatus::Completed);
      }
      return *early;
    }
    return h.finish(OutcomeStatus::Completed);
  }

 private:
  bool farthest_;
};

class HiddenRoomSkill final : public CatalogSkill {
 public:
  HiddenRoomSkill() : CatalogSkill("HiddenRoom", {ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    return plan_search_spot(s, ctx, dead_end_room_walls(s, ctx.params.search_cap));
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override {
    return run_search(plan, h, h.context().params.search_cap);
  }
};

class HiddenCorridorSkill final : public CatalogSkill {
 public:
  HiddenCorridorSkill() : CatalogSkill("HiddenCorridor", {ObsKey::Glyphs}) {}
  std::optional<Plan> plan(const GameState& s, const PlanContext& ctx) const override {
    return plan_search_spot(s, ctx, dead_end_corridors(s, ctx.params.search_cap));
  }
  Outcome execute(const Plan& plan, EpisodeHandle& h) const override {
    return run_search(plan, h, h.context().params.search_cap);
  }
};

class RandomWalkSkill final : public CatalogSkill {
 public:
  RandomWalkSkill() : CatalogSkill("RandomWalk", {}) {}
  std::optional<Plan> plan(const GameState&, const PlanContext&) const override { return Plan{}; }
  Outcome execute(const Plan&, EpisodeHandle& h) const override {
    std::vector<Action> moves = legal_moves(h.state(), h.legal());
    if (moves.empty()) {
      for (Action a : kMoves) {
        if (h.legal().contains(a)) moves.push_back(a);
      }
    }
    if (moves.empty()) return h.finish(OutcomeStatus::Failed);
    h.act(moves[static_cast<std::size_t>(h.rng().below(static_cast<int>(moves.size())))]);
    return h.finish(OutcomeStatus::Completed);
  }
};

}  // namespace

PriorityList default_priorities() {
  return {"Pray",         "Eat",            "Elbereth", "Run",    "Break",      "Fight",         "Gold",
          "StairsDescend", "StairsAscend", "ExploreClosest", "Horizon", "Unseen", "HiddenRoom", "HiddenCorridor"};
}

PriorityList room_priorities() { return {"ExploreClosest", "Unseen"}; }

std::span<const std::string_view> builtin_skill_names() { return kBuiltinNames; }

std::shared_ptr<const Skill> make_builtin_skill(std::string_view name) {
  if (name == "Pray") return std::make_shared<PraySkill>();
  if (name == "Eat") return std::make_shared<EatSkill>();
  if (name == "Elbereth") return std::make_shared<ElberethSkill>();
  if (name == "Run") return std::make_shared<RunSkill>();
  if (name == "Break") return std::make_shared<BreakSkill>();
  if (name == "Fight") return std::make_shared<FightSkill>();
  if (name == "Gold") return std::make_shared<GoldSkill>();
  if (name == "StairsDescend") return std::make_shared<StairsSkill>(true);
  if (name == "StairsAscend") return std::make_shared<StairsSkill>(false);
  if (name == "ExploreClosest") return std::make_shared<ExploreClosestSkill>();
  if (name == "Horizon") return std::make_shared<FrontierSkill>(true);
  if (name == "Unseen") return std::make_shared<FrontierSkill>(false);
  if (name == "HiddenRoom") return std::make_shared<HiddenRoomSkill>();
  if (name == "HiddenCorridor") return std::make_shared<HiddenCorridorSkill>();
  if (name == "RandomWalk") return std::make_shared<RandomWalkSkill>();
  throw UnknownSkill("unknown skill: " + std::string(name));
}

std::size_t choose_index(std::span<const double> dist, SampleMode mode, Rng& rng) {
  if (dist.empty()) throw InvalidArgument("empty distribution");
  if (mode == SampleMode::Argmax) {
    return static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  }
  double total = 0.0;
  for (double p : dist) total += p;
  double u = rng.unit() * total;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    u -= dist[i];
    if (u < 0.0) return i;
  }
  for (std::size_t i = dist.size(); i-- > 0;) {
    if (dist[i] > 0.0) return i;
  }
  return dist.size() - 1;
}

PolicyWalk::PolicyWalk(std::string name, std::shared_ptr<const MovePolicy> policy, SampleMode mode)
    : name_(std::move(name)), policy_(std::move(policy)), mode_(mode) {}

ObservationKeySet PolicyWalk::required_keys() const {
  return policy_ ? policy_->required_keys() : ObservationKeySet{};
}

std::optional<Plan> PolicyWalk::plan(const GameState&, const PlanContext&) const {
  if (!policy_) return std::nullopt;
  return Plan{};
}

Outcome PolicyWalk::execute(const Plan&, EpisodeHandle& h) const {
  std::vector<double> dist = policy_->distribution(h.state());
  const auto actions = policy_->actions();
  bool masked = false;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!h.legal().contains(actions[i]) && dist[i] != 0.0) {
      dist[i] = 0.0;
      masked = true;
    }
  }
  if (masked) {
    const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (sum <= 0.0) return h.finish(OutcomeStatus::Failed);
    for (double& p : dist) p /= sum;
  }
  const std::size_t i = choose_index(dist, mode_, h.rng());
  h.act(actions[i]);
  return h.finish(OutcomeStatus::Completed);
}

SkillRegistry default_registry(std::shared_ptr<const MovePolicy> bc_policy,
                               std::shared_ptr<const MovePolicy> neural_policy, SampleMode mode) {
  SkillRegistry r;
  for (std::string_view name : kBuiltinNames) r.register_skill(make_builtin_skill(name));
  if (bc_policy) r.register_skill(std::make_shared<PolicyWalk>("BCWalk", std::move(bc_policy), mode));
  if (neural_policy) r.register_skill(std::make_shared<PolicyWalk>("NeuralWalk", std::move(neural_policy), mode));
  return r;
}

std::optional<Plan> plan_skill(const SkillRegistry& registry, std::string_view name, const GameState& state,
                               const PlanContext& ctx) {
  const Skill& skill = registry.resolve(name);
  auto p = skill.plan(state, ctx);
  if (p) p->skill = std::string(name);
  return p;
}

std::optional<Plan> plan_skill(std::string_view name, const GameState& state, const PlanContext& ctx) {
  static const SkillRegistry registry = default_registry();
  return plan_skill(registry, name, state, ctx);
}

Outcome execute_skill(const SkillRegistry& registry, const Plan& plan, EpisodeHandle& handle) {
  return registry.resolve(plan.skill).execute(plan, handle);
}

Action flee_step(const GameState& state, const ActionSet& legal) {
  const auto hs = threats(state);
  if (hs.empty()) throw InvalidArgument("flee_step needs a visible hostile");
  std::optional<Action> best;
  double best_score = -1.0;
  for (Action a : kMoves) {
    if (!legal.contains(a)) continue;
    const Cell c = state.agent + move_delta(a);
    if (!planning_walkable(state, c) || state.known(c) == CellKind::DoorClosed || occupied_by_monster(state, c)) {
      continue;
    }
    double score = std::numeric_limits<double>::infinity();
    for (const EntityView* e : hs) score = std::min(score, octile(c, e->pos));
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  if (!best) throw NoLegalMove("no move away from the threat");
  return *best;
}

}  // namespace mera
