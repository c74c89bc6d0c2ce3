#include "mera/state.hpp"

#include <algorithm>
#include <array>

#include "mera/error.hpp"

namespace mera {

namespace {

constexpr std::array<std::string_view, 5> kKeyNames = {"blstats", "chars", "glyphs", "language", "message"};

bool mentions(std::string_view msg, std::string_view sentence) {
  return msg.find(sentence) != std::string_view::npos;
}

std::optional<EntityClass> parse_underfoot(std::string_view msg) {
  if (mentions(msg, "You see here a food ration.")) return EntityClass::Food;
  const auto at = msg.find("You see here ");
  if (at != std::string_view::npos && msg.find(" gold pieces.", at) != std::string_view::npos) {
    return EntityClass::Gold;
  }
  return std::nullopt;
}

// Hides fields the agent is not allowed to read.
Observation filter(const Observation& obs, ObservationKeySet keys) {
  Observation out = obs;
  if (!keys.contains(ObsKey::Glyphs)) out.glyphs.fill(glyph::kBlank);
  if (!keys.contains(ObsKey::Chars)) out.chars.fill(' ');
  if (!keys.contains(ObsKey::Message)) out.message.clear();
  if (!keys.contains(ObsKey::Blstats)) {
    BlStats hidden;
    hidden.depth = 0;
    out.blstats = hidden;
  }
  return out;
}

}  // namespace

std::string_view obs_key_name(ObsKey k) { return kKeyNames.at(static_cast<std::size_t>(k)); }

std::optional<ObsKey> parse_obs_key(std::string_view name) {
  for (std::size_t i = 0; i < kKeyNames.size(); ++i) {
    if (kKeyNames[i] == name) return static_cast<ObsKey>(i);
  }
  return std::nullopt;
}

ObservationKeySet ObservationKeySet::parse(std::string_view list) {
  ObservationKeySet out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    std::string_view item = list.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const auto k = parse_obs_key(item);
      if (!k) throw InvalidArgument("unknown observation key: " + std::string(item));
      out.insert(*k);
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<ObsKey> ObservationKeySet::keys() const {
  std::vector<ObsKey> out;
  for (ObsKey k : kAllObsKeys) {
    if (contains(k)) out.push_back(k);
  }
  return out;
}

std::vector<std::string> ObservationKeySet::names() const {
  std::vector<std::string> out;
  for (ObsKey k : keys()) out.emplace_back(obs_key_name(k));
  return out;
}

std::string ObservationKeySet::to_string() const {
  std::string out;
  for (const auto& n : names()) {
    if (!out.empty()) out += ',';
    out += n;
  }
  return out;
}

std::optional<EntityView> entity_from_glyph(Glyph g, Cell pos) {
  EntityView e;
  e.pos = pos;
  if (glyph::is_monster(g)) {
    const int sp = glyph::monster_species(g);
    if (sp < 0 || sp >= static_cast<int>(species_table().size())) return std::nullopt;
    e.cls = EntityClass::Monster;
    e.species = sp;
    e.hostile = true;
    e.passive = species(sp).passive;
    return e;
  }
  switch (g) {
    case glyph::kFood: e.cls = EntityClass::Food; return e;
    case glyph::kGold: e.cls = EntityClass::Gold; return e;
    case glyph::kKey: e.cls = EntityClass::Key; return e;
    case glyph::kPet: e.cls = EntityClass::Pet; return e;
    default: return std::nullopt;
  }
}

const EntityView* GameState::entity_at(Cell c) const {
  for (const auto& e : entities) {
    if (e.pos == c) return &e;
  }
  return nullptr;
}

GameState refine(const GameState& prev, const Observation& raw, std::optional<Action> action) {
  GameState s = prev;
  const Observation obs = filter(raw, prev.exposed);
  const Extent ext = obs.extent();

  int depth = obs.blstats.depth;
  if (!prev.exposed.contains(ObsKey::Blstats)) depth = prev.initialized() ? prev.depth : 1;

  const bool fresh = !prev.initialized() || depth != prev.depth;
  if (!fresh && prev.extent() != ext) {
    throw DimensionMismatch("observation is " + std::to_string(ext.rows) + "x" + std::to_string(ext.cols) +
                            ", state is " + std::to_string(prev.extent().rows) + "x" +
                            std::to_string(prev.extent().cols));
  }
  if (fresh) {
    s.explored = Grid<bool>(ext, false);
    s.known_map = Grid<CellKind>(ext, CellKind::Stone);
    s.visited = Grid<bool>(ext, false);
    s.search_count = Grid<int>(ext, 0);
    s.stairs_down_pos.reset();
    s.stairs_up_pos.reset();
    if (auto it = s.stairs_down_by_depth.find(depth); it != s.stairs_down_by_depth.end()) s.stairs_down_pos = it->second;
    if (auto it = s.stairs_up_by_depth.find(depth); it != s.stairs_up_by_depth.end()) s.stairs_up_pos = it->second;
  }
  s.depth = depth;
  s.current_obs = obs;
  s.visible = Grid<bool>(ext, false);
  s.entities.clear();

  const Cell old_agent = prev.agent;
  std::optional<Cell> agent;
  if (prev.exposed.contains(ObsKey::Blstats)) agent = obs.blstats.pos;

  for (int r = 0; r < ext.rows; ++r) {
    for (int c = 0; c < ext.cols; ++c) {
      const Cell cell{r, c};
      const Glyph g = obs.glyphs[cell];
      if (g == glyph::kBlank) continue;
      s.visible[cell] = true;
      if (glyph::is_terrain(g)) {
        const CellKind k = glyph::terrain_kind(g);
        s.known_map[cell] = k;
        if (k == CellKind::StairsDown) s.stairs_down_pos = cell;
        if (k == CellKind::StairsUp) s.stairs_up_pos = cell;
      } else {
        // Something stands on the cell; keep what was under it, else assume floor.
        if (!s.explored[cell]) s.known_map[cell] = CellKind::Floor;
        if (g == glyph::kAgent) {
          if (!agent) agent = cell;
        } else if (auto e = entity_from_glyph(g, cell)) {
          s.entities.push_back(*e);
        }
      }
      s.explored[cell] = true;
    }
  }
  if (agent && ext.contains(*agent)) {
    s.agent = *agent;
    if (!s.explored[s.agent]) {
      s.explored[s.agent] = true;
      s.known_map[s.agent] = CellKind::Floor;
    }
    s.visited[s.agent] = true;
  }
  if (s.stairs_down_pos) s.stairs_down_by_depth[depth] = *s.stairs_down_pos;
  if (s.stairs_up_pos) s.stairs_up_by_depth[depth] = *s.stairs_up_pos;

  s.threat = {};
  for (const auto& e : s.entities) {
    if (!e.threatening() || !adjacent8(e.pos, s.agent)) continue;
    ++s.threat.adjacent_hostiles;
    s.threat.strongest_adjacent_hp = std::max(s.threat.strongest_adjacent_hp, species(e.species).hp);
  }

  if (action) {
    s.last_action = action;
    if (*action == Action::Search) {
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const Cell c = s.agent + Cell{dr, dc};
          if (ext.contains(c)) ++s.search_count[c];
        }
      }
    }
  }

  const std::string_view msg = obs.message;
  if (auto seen = parse_underfoot(msg)) {
    s.underfoot = seen;
  } else if (fresh || s.agent != old_agent) {
    s.underfoot.reset();
  } else if (action == Action::Eat && mentions(msg, "This food ration is delicious!")) {
    s.underfoot.reset();
  } else if (action == Action::PickUp && s.underfoot == EntityClass::Gold && mentions(msg, " gold pieces.")) {
    s.underfoot.reset();
  }
  if (mentions(msg, "You pick up a key.")) s.carrying_key = true;
  return s;
}

std::vector<Cell> find_entities(const GameState& state, EntityClass cls) {
  std::vector<Cell> out;
  for (const auto& e : state.entities) {
    if (e.cls == cls) out.push_back(e.pos);
  }
  return out;
}

std::string_view atomic_name(AtomicName n) {
  switch (n) {
    case AtomicName::PrayConfirmed: return "PrayConfirmed";
    case AtomicName::EngraveElbereth: return "EngraveElbereth";
    case AtomicName::EatNearest: return "EatNearest";
    case AtomicName::DescendHere: return "DescendHere";
    case AtomicName::AscendHere: return "AscendHere";
    case AtomicName::OpenAdjacentDoor: return "OpenAdjacentDoor";
  }
  return "?";
}

std::vector<CommandStep> expand_atomic(AtomicCommand cmd) {
  switch (cmd.name) {
    case AtomicName::PrayConfirmed: return {{Action::Pray, ""}};
    case AtomicName::EngraveElbereth: return {{Action::Engrave, "Elbereth"}};
    case AtomicName::EatNearest: return {{Action::Eat, ""}};
    case AtomicName::DescendHere: return {{Action::Descend, ""}};
    case AtomicName::AscendHere: return {{Action::Ascend, ""}};
    case AtomicName::OpenAdjacentDoor: return {{Action::Open, ""}};
  }
  return {};
}

}  // namespace mera
