#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speedbench/geometry.hpp"
#include "speedbench/scenario_config.hpp"
#include "speedbench/world.hpp"

namespace speedbench {

struct LeadSample {
  Vec2 pos{};
  double speed = 0.0;
  double s = 0.0;

  friend bool operator==(const LeadSample&, const LeadSample&) = default;
};

/// One simulated frame as it appears in a log.
struct LogFrame {
  std::int64_t frame = 0;
  double t = 0.0;
  Vec2 pos{};
  double s = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double lane_offset = 0.0;
  double heading = 0.0;
  std::optional<LeadSample> lead;
  double target_speed = 0.0;
  Behavior behavior = Behavior::None;

  friend bool operator==(const LogFrame&, const LogFrame&) = default;
};

struct LogMeta {
  std::string route_id;
  std::uint64_t seed = 0;
  std::string config_digest;
  Difficulty difficulty = Difficulty::Easy;
  std::string policy;
  Termination termination = Termination::Running;
  int collisions = 0;
  std::vector<ScenarioOutcome> outcomes;

  friend bool operator==(const LogMeta&, const LogMeta&) = default;
};

/// Per-frame ego/lead record of one episode. Frames are spaced 1/FPS apart
/// with contiguous indices from 0.
struct TrajectoryLog {
  LogMeta meta;
  std::vector<LogFrame> frames;

  friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

/// Snapshot of the world as a log frame.
LogFrame capture_frame(const WorldState& state);

/// JSON-Lines: the first line is the meta object, each following line one
/// frame with a fixed key order. Floats carry 9 significant digits.
std::string to_jsonl(const TrajectoryLog& log);
void write_jsonl(std::ostream& out, const TrajectoryLog& log);

/// Throws ParseError on malformed lines or missing keys.
TrajectoryLog parse_jsonl(std::string_view text);

}  // namespace speedbench
