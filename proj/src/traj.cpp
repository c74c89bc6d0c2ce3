#include "mera/traj.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mera/error.hpp"

namespace mera {

using nlohmann::json;

namespace {

template <class T>
json grid_to_json(const Grid<T>& g) {
  json rows = json::array();
  for (int r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < g.cols(); ++c) row.push_back(static_cast<int>(g.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
Grid<T> grid_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("grid must be an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(j.at(0).size());
  Grid<T> g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) throw InvalidArgument("grid rows differ in length");
    for (int c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number_integer()) throw InvalidArgument("grid entries must be integers");
      g.at(r, c) = static_cast<T>(v.get<int>());
    }
  }
  return g;
}

json field_value(ObsKey key, const Observation& obs, const GameState& state) {
  switch (key) {
    case ObsKey::Blstats: return blstats_to_json(obs.blstats);
    case ObsKey::Chars: return grid_to_json(obs.chars);
    case ObsKey::Glyphs: return glyphs_to_json(obs.glyphs);
    case ObsKey::Language: return to_language(obs, state);
    case ObsKey::Message: return obs.message;
  }
  return nullptr;
}

// Throws if a stored field does not have the shape its key implies.
void check_field(ObsKey key, const json& v) {
  switch (key) {
    case ObsKey::Blstats: blstats_from_json(v); break;
    case ObsKey::Chars: grid_from_json<char>(v); break;
    case ObsKey::Glyphs: grid_from_json<Glyph>(v); break;
    case ObsKey::Language:
    case ObsKey::Message:
      if (!v.is_string()) throw InvalidArgument(std::string(obs_key_name(key)) + " must be a string");
      break;
  }
}

std::string article_for(std::string_view name) {
  const char c = name.empty() ? 'x' : static_cast<char>(std::tolower(static_cast<unsigned char>(name.front())));
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return std::string(vowel ? "an " : "a ") + std::string(name);
}

std::optional<std::string> feature_name(Glyph g) {
  if (glyph::is_terrain(g)) {
    switch (glyph::terrain_kind(g)) {
      case CellKind::DoorClosed: return "a closed door";
      case CellKind::DoorOpen: return "an open door";
      case CellKind::DoorLocked: return "a locked door";
      case CellKind::StairsDown: return "a staircase down";
      case CellKind::StairsUp: return "a staircase up";
      default: return std::nullopt;
    }
  }
  if (glyph::is_monster(g)) {
    const int sp = glyph::monster_species(g);
    if (sp >= static_cast<int>(species_table().size())) return std::nullopt;
    return article_for(species(sp).name);
  }
  switch (g) {
    case glyph::kFood: return "a food ration";
    case glyph::kGold: return "a pile of gold";
    case glyph::kKey: return "a key";
    case glyph::kPet: return article_for(PetData::kName);
    default: return std::nullopt;
  }
}

std::string_view proximity(int d) {
  if (d <= 1) return "adjacent";
  if (d <= 2) return "very near";
  if (d <= 5) return "near";
  return "far";
}

// 8-way compass direction; sector boundaries sit at 22.5 degrees off the
// axes, tested exactly in integers.
std::string_view direction(Cell from, Cell to) {
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  const long ar = std::abs(dr);
  const long ac = std::abs(dc);
  // |dr| < tan(22.5)|dc|  <=>  (|dr| + |dc|)^2 < 2 dc^2
  if ((ar + ac) * (ar + ac) < 2 * ac * ac) return dc > 0 ? "east" : "west";
  if ((ar + ac) * (ar + ac) < 2 * ar * ar) return dr > 0 ? "south" : "north";
  if (dr < 0) return dc > 0 ? "northeast" : "northwest";
  return dc > 0 ? "southeast" : "southwest";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

json blstats_to_json(const BlStats& b) {
  json j;
  j["hp"] = b.hp;
  j["max_hp"] = b.max_hp;
  j["hunger"] = static_cast<int>(b.hunger);
  j["depth"] = b.depth;
  j["gold"] = b.gold;
  j["turn"] = b.turn;
  j["score"] = b.score;
  j["pos"] = {b.pos.row, b.pos.col};
  j["last_prayer_turn"] = b.last_prayer_turn ? json(*b.last_prayer_turn) : json(nullptr);
  return j;
}

BlStats blstats_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("blstats must be an object");
  BlStats b;
  b.hp = j.at("hp").get<int>();
  b.max_hp = j.at("max_hp").get<int>();
  const int hunger = j.at("hunger").get<int>();
  if (hunger < 0 || hunger > static_cast<int>(Hunger::Fainting)) throw InvalidArgument("hunger out of range");
  b.hunger = static_cast<Hunger>(hunger);
  b.depth = j.at("depth").get<int>();
  b.gold = j.at("gold").get<int>();
  b.turn = j.at("turn").get<int>();
  b.score = j.at("score").get<int>();
  const json& pos = j.at("pos");
  if (!pos.is_array() || pos.size() != 2) throw InvalidArgument("pos must be [row, col]");
  b.pos = {pos[0].get<int>(), pos[1].get<int>()};
  const json& pray = j.at("last_prayer_turn");
  if (!pray.is_null()) b.last_prayer_turn = pray.get<int>();
  return b;
}

json glyphs_to_json(const Grid<Glyph>& g) { return grid_to_json(g); }
Grid<Glyph> glyphs_from_json(const json& j) { return grid_from_json<Glyph>(j); }

TrajectoryRecord make_trajectory(std::uint64_t episode_id, std::uint64_t seed, ObservationKeySet keys) {
  if (keys.empty()) throw InvalidArgument("a trajectory needs at least one observation key");
  TrajectoryRecord t;
  t.episode_id = episode_id;
  t.seed = seed;
  t.keys = keys;
  return t;
}

TrajectoryRecord& record_step(TrajectoryRecord& traj, const Observation& obs, const GameState& state, Action action,
                              ObservationKeySet keys) {
  if (keys != traj.keys) {
    throw KeyMismatch("step keys {" + keys.to_string() + "} differ from trajectory keys {" + traj.keys.to_string() + "}");
  }
  TrajectoryStep step;
  step.action = action;
  for (ObsKey k : keys.keys()) step.fields.emplace(obs_key_name(k), field_value(k, obs, state));
  traj.steps.push_back(std::move(step));
  return traj;
}

void save(const TrajectoryRecord& traj, std::ostream& out) {
  json header;
  header["episode_id"] = traj.episode_id;
  header["format"] = kTrajectoryFormat;
  header["keys"] = traj.keys.names();
  header["seed"] = traj.seed;
  out << header.dump() << '\n';
  for (const auto& step : traj.steps) {
    json line;
    line["action"] = action_name(step.action);
    line["obs"] = json::object();
    for (const auto& [k, v] : step.fields) line["obs"][k] = v;
    out << line.dump() << '\n';
  }
}

void save(const TrajectoryRecord& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save(traj, out);
  if (!out) throw IoError("write failed: " + path.string());
}

TrajectoryRecord load(std::istream& in) {
  TrajectoryRecord t;
  std::string text;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw FormatError(line_no, "empty line");
    }
    try {
      const json j = json::parse(text);
      if (!j.is_object()) throw FormatError(line_no, "expected an object");
      if (!have_header) {
        if (j.value("format", std::string{}) != kTrajectoryFormat) {
          throw FormatError(line_no, "not a meratrj-1 header");
        }
        t.episode_id = j.at("episode_id").get<std::uint64_t>();
        t.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& k : j.at("keys")) {
          const auto key = parse_obs_key(k.get<std::string>());
          if (!key) throw FormatError(line_no, "unknown key " + k.get<std::string>());
          t.keys.insert(*key);
        }
        if (t.keys.empty()) throw FormatError(line_no, "empty key set");
        have_header = true;
        continue;
      }
      if (j.size() != 2 || !j.contains("action") || !j.contains("obs")) {
        throw FormatError(line_no, "step needs exactly action and obs");
      }
      TrajectoryStep step;
      const auto action = parse_action(j.at("action").get<std::string>());
      if (!action) throw FormatError(line_no, "unknown action");
      step.action = *action;
      const json& obs = j.at("obs");
      if (!obs.is_object() || obs.size() != t.keys.keys().size()) throw FormatError(line_no, "observation keys differ from header");
      for (ObsKey k : t.keys.keys()) {
        const std::string name(obs_key_name(k));
        if (!obs.contains(name)) throw FormatError(line_no, "missing key " + name);
        check_field(k, obs.at(name));
        step.fields.emplace(name, obs.at(name));
      }
      t.steps.push_back(std::move(step));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(line_no, e.what());
    }
  }
  if (!have_header) throw FormatError(line_no + 1, "missing header");
  return t;
}

TrajectoryRecord load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return load(in);
}

Observation step_observation(const TrajectoryStep& step) {
  const auto g = step.fields.find("glyphs");
  const auto b = step.fields.find("blstats");
  if (g == step.fields.end() || b == step.fields.end()) {
    throw MissingKeys("features need the glyphs and blstats keys");
  }
  Observation obs;
  obs.glyphs = glyphs_from_json(g->second);
  obs.blstats = blstats_from_json(b->second);
  if (const auto c = step.fields.find("chars"); c != step.fields.end()) {
    obs.chars = grid_from_json<char>(c->second);
  }
  if (const auto m = step.fields.find("message"); m != step.fields.end()) obs.message = m->second.get<std::string>();
  return obs;
}

std::string to_language(const Observation& obs, const GameState& state) {
  std::ostringstream out;
  bool first = true;
  auto sentence = [&](const std::string& s) {
    if (!first) out << '\n';
    out << s;
    first = false;
  };
  if (!obs.message.empty()) sentence(obs.message);

  const Cell agent = state.initialized() ? state.agent : obs.blstats.pos;
  struct Feature {
    int dist;
    Cell cell;
    std::string name;
  };
  std::vector<Feature> features;
  const Extent ext = obs.extent();
  for (int r = 0; r < ext.rows; ++r) {
    for (int c = 0; c < ext.cols; ++c) {
      const Cell cell{r, c};
      if (cell == agent) continue;
      if (auto name = feature_name(obs.glyphs[cell])) features.push_back({chebyshev(agent, cell), cell, *name});
    }
  }
  std::stable_sort(features.begin(), features.end(),
                   [](const Feature& a, const Feature& b) { return std::tie(a.dist, a.cell) < std::tie(b.dist, b.cell); });
  for (const auto& f : features) {
    sentence(f.name + " " + std::string(proximity(f.dist)) + " " + std::string(direction(agent, f.cell)));
  }

  const BlStats& b = obs.blstats;
  std::ostringstream status;
  status << "You have " << b.hp << " out of " << b.max_hp << " hit points, you are " << lower(hunger_name(b.hunger))
         << ", on dungeon level " << b.depth << " with " << b.gold << " gold, turn " << b.turn << ", score " << b.score
         << '.';
  sentence(status.str());
  return out.str();
}

}  // namespace mera
