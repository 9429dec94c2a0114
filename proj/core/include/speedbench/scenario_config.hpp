#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speedbench/geometry.hpp"
#include "speedbench/route.hpp"

namespace speedbench {

enum class Difficulty { Easy, Medium, Hard };

/// Overtake/follow instruction. `None` is only ever an observed state, never
/// a configured scenario behavior.
enum class Behavior { None, Overtake, Follow };

std::string_view to_string(Difficulty d);
std::string_view to_string(Behavior b);
/// Case-insensitive; throws ValidationError on unknown names.
Difficulty parse_difficulty(std::string_view text);
Behavior parse_behavior(std::string_view text);

/// One slow-lead scenario. The lead is spawned `spawn_distance` meters ahead
/// of the ego once the ego passes `trigger_progress * L`.
struct OvertakeSpec {
  double trigger_progress = 0.0;
  double lead_speed = 0.0;
  double spawn_distance = 0.0;
  Behavior behavior = Behavior::Overtake;
  /// Oncoming spawn rate (1/s) for the two-way variant. Parsed and kept, not
  /// simulated.
  std::optional<double> frequency;
  double timeout = 60.0;

  friend bool operator==(const OvertakeSpec&, const OvertakeSpec&) = default;
};

/// Static zero-speed obstacle blocking the ego lane over a normalized
/// progress interval.
struct ObstacleSpec {
  double s_start = 0.0;
  double s_end = 0.0;

  friend bool operator==(const ObstacleSpec&, const ObstacleSpec&) = default;
};

struct ScenarioConfig {
  std::string route_id = "route";
  Difficulty difficulty = Difficulty::Easy;
  std::vector<Vec2> waypoints;
  std::vector<SpeedSegment> speed_segments;
  std::vector<OvertakeSpec> scenarios;
  std::vector<ObstacleSpec> obstacles;
  double default_speed = 0.0;
  std::uint64_t seed = 0;
  std::string weather;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses a route document:
///
///   <route id="" difficulty="easy|medium|hard" seed="" default_speed="" weather="">
///     <waypoints><wp x="" y=""/>...</waypoints>
///     <speed from="" to="" v=""/>...
///     <obstacle from="" to=""/>...
///     <scenario type="OvertakeRoute" behavior="overtake|follow" trigger=""
///               speed="" distance="" frequency="" timeout=""/>...
///   </route>
///
/// The document may also wrap a single <route> in <routes>. Unknown elements
/// are skipped and reported through `warnings` when non-null.
///
/// Throws ParseError for malformed XML, SchemaError for a missing route or
/// waypoint list, and ValidationError for values that break config rules.
ScenarioConfig parse_config(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Canonical document: fixed element order, speed segments sorted by start,
/// numbers printed with six decimals.
std::string serialize_config(const ScenarioConfig& cfg);

/// Checks every cross-field rule (route geometry, speed plan, scenario
/// ranges, Easy routes carry no scenarios). Throws ValidationError.
void validate_config(const ScenarioConfig& cfg);

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_digest(const ScenarioConfig& cfg);

}  // namespace speedbench
