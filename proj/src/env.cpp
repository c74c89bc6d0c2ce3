#include "mera/env.hpp"

#include <algorithm>
#include <sstream>

#include "mera/error.hpp"

namespace mera {

namespace glyph {

char display_char(Glyph g) {
  if (g == kBlank) return ' ';
  if (is_terrain(g)) {
    switch (terrain_kind(g)) {
      case CellKind::Floor: return '.';
      case CellKind::Wall: return '-';
      case CellKind::Stone: return '`';
      case CellKind::Corridor: return '#';
      case CellKind::DoorClosed: return '+';
      case CellKind::DoorOpen: return '\'';
      case CellKind::DoorLocked: return '=';
      case CellKind::StairsDown: return '>';
      case CellKind::StairsUp: return '<';
      default: return '?';
    }
  }
  switch (g) {
    case kAgent: return '@';
    case kFood: return '%';
    case kGold: return '$';
    case kKey: return '(';
    case kPet: return PetData::kLetter;
    default: break;
  }
  if (is_monster(g)) return species(monster_species(g)).letter;
  return '?';
}

}  // namespace glyph

namespace {

bool wallish(Glyph g) {
  if (!glyph::is_terrain(g)) return false;
  const CellKind k = glyph::terrain_kind(g);
  return k == CellKind::Wall || is_door(k);
}

}  // namespace

Grid<char> chars_for(const Grid<Glyph>& glyphs) {
  Grid<char> chars(glyphs.extent(), ' ');
  for (int r = 0; r < glyphs.rows(); ++r) {
    for (int c = 0; c < glyphs.cols(); ++c) {
      const Glyph g = glyphs.at(r, c);
      char ch = glyph::display_char(g);
      if (g == glyph::terrain(CellKind::Wall)) {
        auto wall_at = [&](int rr, int cc) { return glyphs.contains({rr, cc}) && wallish(glyphs.at(rr, cc)); };
        const bool vertical = wall_at(r - 1, c) || wall_at(r + 1, c);
        const bool horizontal = wall_at(r, c - 1) || wall_at(r, c + 1);
        ch = vertical && !horizontal ? '|' : '-';
      }
      chars.at(r, c) = ch;
    }
  }
  return chars;
}

namespace {

Glyph entity_glyph(const Entity& e) {
  return std::visit(
      [](const auto& k) -> Glyph {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Monster>) return glyph::kMonsterBase + k.species;
        if constexpr (std::is_same_v<K, Food>) return glyph::kFood;
        if constexpr (std::is_same_v<K, Gold>) return glyph::kGold;
        if constexpr (std::is_same_v<K, Key>) return glyph::kKey;
        if constexpr (std::is_same_v<K, Pet>) return glyph::kPet;
      },
      e.kind);
}

void append(std::string& msg, std::string_view part) {
  if (part.empty()) return;
  if (!msg.empty()) msg += ' ';
  msg += part;
}

std::string the(std::string_view name) { return "the " + std::string(name); }

}  // namespace

std::string_view hunger_name(Hunger h) {
  switch (h) {
    case Hunger::Satiated: return "Satiated";
    case Hunger::NotHungry: return "Not Hungry";
    case Hunger::Hungry: return "Hungry";
    case Hunger::Weak: return "Weak";
    case Hunger::Fainting: return "Fainting";
  }
  return "?";
}

std::string_view end_reason_name(EndReason r) {
  switch (r) {
    case EndReason::Goal: return "Goal";
    case EndReason::Death: return "Death";
    case EndReason::StepLimit: return "StepLimit";
    case EndReason::Ascended: return "Ascended";
  }
  return "?";
}

int compute_score(const ScoreCounters& c) {
  return c.gold + 50 * (c.max_depth - 1) + 20 * c.kills + c.cells_explored / 10;
}

Observation blank_observation(Extent extent) {
  Observation obs;
  obs.glyphs = Grid<Glyph>(extent, glyph::kBlank);
  obs.chars = Grid<char>(extent, ' ');
  return obs;
}

std::string render_ascii(const Observation& obs) {
  std::ostringstream out;
  out << obs.message << '\n';
  for (int r = 0; r < obs.chars.rows(); ++r) {
    for (int c = 0; c < obs.chars.cols(); ++c) out << obs.chars.at(r, c);
    out << '\n';
  }
  const BlStats& b = obs.blstats;
  out << "HP:" << b.hp << '(' << b.max_hp << ") Hunger:" << hunger_name(b.hunger) << " Dlvl:" << b.depth
      << " $:" << b.gold << " T:" << b.turn << " S:" << b.score << " Pos:" << b.pos.row << ',' << b.pos.col
      << " Pray:";
  if (b.last_prayer_turn) {
    out << *b.last_prayer_turn;
  } else {
    out << '-';
  }
  out << '\n';
  return out.str();
}

ActionSet task_actions(const TaskSpec& task) {
  if (task.kind == TaskKind::FullGameChallenge) return ActionSet::all();
  ActionSet s = ActionSet::of(kMoves);
  for (Action a : {Action::Search, Action::Wait, Action::Open, Action::PickUp}) s.insert(a);
  return s;
}

Env::Env(WorldRules rules) : rules_(rules) {}

Observation Env::reset(const TaskSpec& task) {
  return reset(task, generate_level(task.seed, 1, task));
}

Observation Env::reset(const TaskSpec& task, LevelMap level) {
  if (task.kind == TaskKind::FullGameChallenge && task.levels < 2) {
    throw InvalidArgument("FullGameChallenge needs at least 2 levels");
  }
  if (task.max_steps < 1) throw InvalidArgument("max_steps must be >= 1");
  task_ = task;
  levels_.clear();
  visited_.clear();
  depth_ = level.depth;
  pos_ = level.spawn;
  next_entity_id_ = 1;
  for (const Entity& e : level.entities) next_entity_id_ = std::max(next_entity_id_, e.id + 1);
  levels_.emplace(depth_, std::move(level));
  return begin_episode();
}

Observation Env::begin_episode() {
  rng_ = Rng(mix_seed(task_.seed, 0xE1E1ULL));
  action_set_ = task_actions(task_);
  hp_ = max_hp_ = rules_.agent_max_hp;
  hunger_ = Hunger::NotHungry;
  hunger_clock_ = rest_clock_ = turn_ = actions_taken_ = 0;
  has_key_ = false;
  last_prayer_.reset();
  ward_ = Ward{};
  counters_ = ScoreCounters{0, depth_, 0, 0};
  events_.clear();
  end_.reset();
  visited_[depth_] = Grid<bool>(level().extent(), false);
  compute_visibility();
  visited_[depth_][pos_] = true;
  counters_.cells_explored = 1;
  events_.push_back({0, ScoreEventKind::Explore, 1});
  obs_ = build_observation("");
  return obs_;
}

void Env::set_hp(int hp) {
  hp_ = std::clamp(hp, 0, max_hp_);
  obs_ = build_observation(obs_.message);
}

void Env::set_hunger(Hunger h) {
  hunger_ = h;
  obs_ = build_observation(obs_.message);
}

void Env::set_turn(int turn) {
  turn_ = turn;
  obs_ = build_observation(obs_.message);
}

Entity* Env::entity_at(Cell c, bool creatures) {
  for (Entity& e : current().entities) {
    if (e.pos == c && e.is_creature() == creatures) return &e;
  }
  return nullptr;
}

void Env::remove_entity(int id) {
  auto& ents = current().entities;
  ents.erase(std::remove_if(ents.begin(), ents.end(), [id](const Entity& e) { return e.id == id; }), ents.end());
}

void Env::add_event(ScoreEventKind kind, int amount) { events_.push_back({turn_, kind, amount}); }

bool Env::ward_active() const {
  return ward_.depth == depth_ && ward_.cell == pos_ && turn_ < ward_.until_turn;
}

void Env::compute_visibility() {
  const LevelMap& lvl = level();
  visible_ = Grid<bool>(lvl.extent(), false);
  for (int idx : lvl.rooms_at(pos_)) {
    const Room& r = lvl.rooms[static_cast<std::size_t>(idx)];
    for (int row = r.top; row <= r.bottom; ++row) {
      for (int col = r.left; col <= r.right; ++col) visible_.at(row, col) = true;
    }
  }
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const Cell c{pos_.row + dr, pos_.col + dc};
      if (visible_.contains(c)) visible_[c] = true;
    }
  }
}

Observation Env::build_observation(std::string msg) {
  const LevelMap& lvl = level();
  Observation obs;
  obs.glyphs = Grid<Glyph>(lvl.extent(), glyph::kBlank);
  for (int r = 0; r < lvl.cells.rows(); ++r) {
    for (int c = 0; c < lvl.cells.cols(); ++c) {
      if (visible_.at(r, c)) obs.glyphs.at(r, c) = glyph::terrain(lvl.cells.at(r, c));
    }
  }
  for (const Entity& e : lvl.entities) {
    if (e.is_item() && visible_[e.pos]) obs.glyphs[e.pos] = entity_glyph(e);
  }
  for (const Entity& e : lvl.entities) {
    if (e.is_creature() && visible_[e.pos]) obs.glyphs[e.pos] = entity_glyph(e);
  }
  obs.glyphs[pos_] = glyph::kAgent;
  obs.chars = chars_for(obs.glyphs);
  obs.message = std::move(msg);
  obs.blstats = BlStats{hp_, max_hp_, hunger_, depth_, counters_.gold, turn_, compute_score(counters_), pos_,
                        last_prayer_};
  return obs;
}

void Env::enter_level(int new_depth, bool from_above) {
  if (!levels_.contains(new_depth)) {
    LevelMap lvl = generate_level(task_.seed, new_depth, task_, next_entity_id_);
    for (const Entity& e : lvl.entities) next_entity_id_ = std::max(next_entity_id_, e.id + 1);
    levels_.emplace(new_depth, std::move(lvl));
    visited_[new_depth] = Grid<bool>(levels_.at(new_depth).extent(), false);
  }
  depth_ = new_depth;
  LevelMap& lvl = current();
  const std::optional<Cell> arrival = from_above ? lvl.stairs_up : lvl.stairs_down;
  pos_ = arrival.value_or(lvl.spawn);
  if (Entity* blocker = entity_at(pos_, true)) {
    for (Action a : kMoves) {
      const Cell c = pos_ + move_delta(a);
      if (lvl.cells.contains(c) && passable(lvl.cells[c]) && !entity_at(c, true)) {
        blocker->pos = c;
        break;
      }
    }
  }
  if (new_depth > counters_.max_depth) {
    add_event(ScoreEventKind::Depth, new_depth - counters_.max_depth);
    counters_.max_depth = new_depth;
  }
}

void Env::agent_attack(Entity& target, std::string& msg) {
  auto& mon = std::get<Monster>(target.kind);
  const Species& sp = species(mon.species);
  if (!rng_.chance(4, 5)) {
    append(msg, "You miss " + the(sp.name) + ".");
    return;
  }
  mon.hp -= rng_.between(1, 6);
  if (sp.passive_damage > 0) {
    const int dmg = rng_.between(1, sp.passive_damage);
    hp_ -= dmg;
    append(msg, "You are hit by " + the(sp.name) + "'s gaze!");
  }
  if (mon.hp <= 0) {
    append(msg, "You kill " + the(sp.name) + "!");
    remove_entity(target.id);
    ++counters_.kills;
    add_event(ScoreEventKind::Kill, 1);
  } else {
    append(msg, "You hit " + the(sp.name) + ".");
  }
}

bool Env::try_move(Action a, std::string& msg, bool& consumed) {
  LevelMap& lvl = current();
  const Cell target = pos_ + move_delta(a);
  if (!lvl.cells.contains(target)) {
    append(msg, "It's solid stone.");
    consumed = false;
    return false;
  }
  if (Entity* creature = entity_at(target, true)) {
    if (creature->is_pet()) {
      creature->pos = pos_;
      pos_ = target;
      append(msg, "You swap places with your kitten.");
      return true;
    }
    agent_attack(*creature, msg);
    return false;
  }
  switch (lvl.cells[target]) {
    case CellKind::Wall:
    case CellKind::HiddenDoor:
      append(msg, "It's a wall.");
      consumed = false;
      return false;
    case CellKind::Stone:
    case CellKind::HiddenCorridor:
      append(msg, "It's solid stone.");
      consumed = false;
      return false;
    case CellKind::DoorClosed:
      lvl.cells[target] = CellKind::DoorOpen;
      append(msg, "The door opens.");
      return false;
    case CellKind::DoorLocked:
      if (has_key_) {
        lvl.cells[target] = CellKind::DoorOpen;
        append(msg, "You unlock and open the door.");
      } else {
        append(msg, "This door is locked.");
        consumed = false;
      }
      return false;
    default:
      break;
  }
  pos_ = target;
  if (Entity* item = entity_at(pos_, false)) {
    if (std::holds_alternative<Key>(item->kind)) {
      has_key_ = true;
      append(msg, "You pick up a key.");
      remove_entity(item->id);
    } else if (const auto* gold = std::get_if<Gold>(&item->kind)) {
      append(msg, "You see here " + std::to_string(gold->amount) + " gold pieces.");
    } else if (std::holds_alternative<Food>(item->kind)) {
      append(msg, "You see here a food ration.");
    }
  }
  if (task_.goal_task() && lvl.cells[pos_] == CellKind::StairsDown) end_ = EndReason::Goal;
  return true;
}

void Env::do_search(std::string& msg) {
  LevelMap& lvl = current();
  for (Action a : kMoves) {
    const Cell c = pos_ + move_delta(a);
    if (!lvl.cells.contains(c)) continue;
    const CellKind k = lvl.cells[c];
    if (k != CellKind::HiddenCorridor && k != CellKind::HiddenDoor) continue;
    if (!rng_.chance(rules_.search_reveal_numerator, rules_.search_reveal_denominator)) continue;
    if (k == CellKind::HiddenCorridor) {
      lvl.cells[c] = CellKind::Corridor;
      append(msg, "You find a hidden passage.");
    } else {
      lvl.cells[c] = CellKind::DoorClosed;
      append(msg, "You find a hidden door.");
    }
  }
}

void Env::monsters_act(std::string& msg) {
  LevelMap& lvl = current();
  std::vector<int> order;
  for (const Entity& e : lvl.entities) {
    if (e.is_creature()) order.push_back(e.id);
  }
  std::sort(order.begin(), order.end());
  const bool warded = ward_active();

  auto free_for_creature = [&](Cell c) {
    return lvl.cells.contains(c) && passable(lvl.cells[c]) && c != pos_ && !entity_at(c, true);
  };
  auto dist2 = [](Cell a, Cell b) {
    const int dr = a.row - b.row, dc = a.col - b.col;
    return dr * dr + dc * dc;
  };
  // Best step toward the agent, optionally refusing cells adjacent to it.
  auto approach = [&](Entity& e, bool keep_off) {
    auto rank = [&](Cell c) { return std::pair{chebyshev(c, pos_), dist2(c, pos_)}; };
    auto best = rank(e.pos);
    std::optional<Cell> choice;
    for (Action a : kMoves) {
      const Cell c = e.pos + move_delta(a);
      if (!free_for_creature(c) || (keep_off && chebyshev(c, pos_) <= 1)) continue;
      if (rank(c) < best) {
        best = rank(c);
        choice = c;
      }
    }
    if (choice) e.pos = *choice;
  };
  auto retreat = [&](Entity& e) {
    std::optional<Cell> choice;
    int best = chebyshev(e.pos, pos_);
    for (Action a : kMoves) {
      const Cell c = e.pos + move_delta(a);
      if (free_for_creature(c) && chebyshev(c, pos_) > best) {
        best = chebyshev(c, pos_);
        choice = c;
      }
    }
    if (choice) e.pos = *choice;
  };

  for (int id : order) {
    auto it = std::find_if(lvl.entities.begin(), lvl.entities.end(), [id](const Entity& e) { return e.id == id; });
    if (it == lvl.entities.end()) continue;
    Entity& e = *it;
    if (e.is_pet()) {
      if (chebyshev(e.pos, pos_) > 2) {
        approach(e, false);
      } else {
        const int pick = rng_.below(kMoveCount + 1);
        if (pick < kMoveCount) {
          const Cell c = e.pos + move_delta(kMoves[static_cast<std::size_t>(pick)]);
          if (free_for_creature(c)) e.pos = c;
        }
      }
      if (Entity* food = entity_at(e.pos, false); food && std::holds_alternative<Food>(food->kind)) {
        remove_entity(food->id);
      }
      continue;
    }
    const auto& mon = std::get<Monster>(e.kind);
    if (!mon.hostile || mon.passive) continue;
    const int dist = chebyshev(e.pos, pos_);
    if (dist > rules_.monster_sight) continue;
    if (warded) {
      if (dist <= 1) {
        retreat(e);
      } else {
        approach(e, true);
      }
      continue;
    }
    if (dist == 1) {
      const Species& sp = species(mon.species);
      if (rng_.below(100) < sp.hit_percent) {
        hp_ -= rng_.between(sp.damage_min, sp.damage_max);
        append(msg, "The " + std::string(sp.name) + " hits!");
      } else {
        append(msg, "The " + std::string(sp.name) + " misses.");
      }
      if (hp_ <= 0) return;
    } else {
      approach(e, false);
    }
  }
}

void Env::end_of_turn(std::string& msg, Action a) {
  if (!end_) monsters_act(msg);
  ++turn_;
  if (++hunger_clock_ >= rules_.hunger_interval) {
    hunger_clock_ = 0;
    if (hunger_ < Hunger::Fainting) {
      hunger_ = static_cast<Hunger>(static_cast<int>(hunger_) + 1);
      if (hunger_ == Hunger::Hungry) append(msg, "You are beginning to feel hungry.");
      if (hunger_ == Hunger::Weak) append(msg, "You are beginning to feel weak.");
      if (hunger_ == Hunger::Fainting) append(msg, "You faint from lack of food.");
    }
  }
  if (hunger_ == Hunger::Fainting) --hp_;
  if (a == Action::Search || a == Action::Wait) {
    if (++rest_clock_ >= rules_.rest_turns_per_hp) {
      rest_clock_ = 0;
      hp_ = std::min(max_hp_, hp_ + 1);
    }
  }
  if (hp_ <= 0 && end_ != EndReason::Goal) {
    hp_ = 0;
    append(msg, "You die...");
    end_ = EndReason::Death;
  }
}

StepResult Env::step(Action action, std::string_view text) {
  if (end_) throw EpisodeFinished("episode already finished");
  if (static_cast<int>(action) >= kActionCount || !action_set_.contains(action)) {
    throw IllegalAction("action not in this task's action set");
  }
  ++actions_taken_;
  std::string msg;
  bool consumed = true;
  LevelMap* lvl = &current();

  if (is_move(action)) {
    try_move(action, msg, consumed);
  } else {
    switch (action) {
      case Action::Search:
        do_search(msg);
        break;
      case Action::Wait:
        break;
      case Action::Eat:
        if (Entity* item = entity_at(pos_, false); item && std::holds_alternative<Food>(item->kind)) {
          remove_entity(item->id);
          hunger_ = Hunger::NotHungry;
          hunger_clock_ = 0;
          append(msg, "This food ration is delicious!");
        } else {
          append(msg, "You don't have anything to eat.");
        }
        break;
      case Action::Pray: {
        const bool trouble = hp_ * 3 < max_hp_ || hunger_ >= Hunger::Weak;
        const bool ready = !last_prayer_ || turn_ - *last_prayer_ > rules_.prayer_timeout;
        if (trouble && ready) {
          hp_ = max_hp_;
          if (hunger_ >= Hunger::Hungry) hunger_ = Hunger::NotHungry;
          hunger_clock_ = 0;
          append(msg, "You feel much better.");
        } else {
          append(msg, "You feel that Anhur is displeased.");
        }
        last_prayer_ = turn_;
        break;
      }
      case Action::Engrave:
        append(msg, "You write in the dust with your fingertip.");
        if (text == "Elbereth") ward_ = Ward{depth_, pos_, turn_ + 1 + rules_.elbereth_turns};
        break;
      case Action::Descend:
        if (lvl->cells[pos_] == CellKind::StairsDown && !task_.goal_task()) {
          enter_level(depth_ + 1, true);
          append(msg, "You descend the stairs.");
        } else {
          append(msg, "You can't go down here.");
        }
        break;
      case Action::Ascend:
        if (lvl->cells[pos_] == CellKind::StairsUp && depth_ > 1) {
          enter_level(depth_ - 1, false);
          append(msg, "You climb up the stairs.");
          if (task_.ascent_objective && depth_ == 1 && counters_.max_depth >= task_.levels) {
            end_ = EndReason::Ascended;
          }
        } else {
          append(msg, "You can't go up here.");
        }
        break;
      case Action::Open: {
        bool acted = false;
        for (Action a : kMoves) {
          const Cell c = pos_ + move_delta(a);
          if (!lvl->cells.contains(c)) continue;
          if (lvl->cells[c] == CellKind::DoorClosed) {
            lvl->cells[c] = CellKind::DoorOpen;
            append(msg, "The door opens.");
            acted = true;
            break;
          }
          if (lvl->cells[c] == CellKind::DoorLocked) {
            if (has_key_) {
              lvl->cells[c] = CellKind::DoorOpen;
              append(msg, "You unlock and open the door.");
            } else {
              append(msg, "This door is locked.");
            }
            acted = true;
            break;
          }
        }
        if (!acted) append(msg, "You see no door there.");
        break;
      }
      case Action::PickUp: {
        Entity* item = entity_at(pos_, false);
        if (item == nullptr) {
          append(msg, "There is nothing here to pick up.");
        } else if (const auto* gold = std::get_if<Gold>(&item->kind)) {
          counters_.gold += gold->amount;
          add_event(ScoreEventKind::Gold, gold->amount);
          append(msg, std::to_string(gold->amount) + " gold pieces.");
          remove_entity(item->id);
        } else if (std::holds_alternative<Key>(item->kind)) {
          has_key_ = true;
          append(msg, "You pick up a key.");
          remove_entity(item->id);
        } else {
          append(msg, "You leave the food ration where it is.");
        }
        break;
      }
      default:
        break;
    }
  }

  if (consumed) end_of_turn(msg, action);
  compute_visibility();
  if (auto& visited = visited_[depth_]; !visited[pos_]) {
    visited[pos_] = true;
    ++counters_.cells_explored;
    add_event(ScoreEventKind::Explore, 1);
  }
  if (!end_ && actions_taken_ >= task_.max_steps) end_ = EndReason::StepLimit;

  obs_ = build_observation(std::move(msg));
  StepResult result;
  result.observation = obs_;
  result.done = end_.has_value();
  result.info.reason = end_;
  result.reward = end_ == EndReason::Goal ? 1.0 : 0.0;
  return result;
}

}  // namespace mera
