#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mera/env.hpp"
#include "mera/state.hpp"

namespace mera {

inline constexpr std::string_view kTrajectoryFormat = "meratrj-1";

struct TrajectoryStep {
  std::map<std::string, nlohmann::json> fields;  ///< observation key -> value
  Action action = Action::Wait;
  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct TrajectoryRecord {
  std::uint64_t episode_id = 0;
  std::uint64_t seed = 0;
  ObservationKeySet keys;
  std::vector<TrajectoryStep> steps;
  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

/// A new empty trajectory. Throws InvalidArgument if `keys` is empty.
TrajectoryRecord make_trajectory(std::uint64_t episode_id, std::uint64_t seed, ObservationKeySet keys);

/// Appends the observation the action was chosen from. Throws KeyMismatch
/// when `keys` differs from the trajectory's key set.
TrajectoryRecord& record_step(TrajectoryRecord& traj, const Observation& obs, const GameState& state, Action action,
                              ObservationKeySet keys);

void save(const TrajectoryRecord& traj, std::ostream& out);
void save(const TrajectoryRecord& traj, const std::filesystem::path& path);
/// Throws FormatError (with 1-based line number) on malformed input.
TrajectoryRecord load(std::istream& in);
TrajectoryRecord load(const std::filesystem::path& path);

/// JSON forms of observation fields.
nlohmann::json blstats_to_json(const BlStats& b);
BlStats blstats_from_json(const nlohmann::json& j);
nlohmann::json glyphs_to_json(const Grid<Glyph>& g);
Grid<Glyph> glyphs_from_json(const nlohmann::json& j);

/// Rebuilds the parts of an observation present in a step. Throws
/// MissingKeys when glyphs or blstats are absent.
Observation step_observation(const TrajectoryStep& step);

/// Text rendering: message, one sentence per visible feature, then status.
std::string to_language(const Observation& obs, const GameState& state);

}  // namespace mera
