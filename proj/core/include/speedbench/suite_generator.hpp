#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "speedbench/scenario_config.hpp"

namespace speedbench {

/// Road layouts used as route templates, one family per difficulty row.
enum class Layout {
  RuralCurving,
  LeftTurnUrban,
  StraightUrban,
  WideStreet,
  RightTurnRural,
};

std::string_view to_string(Layout layout);

/// Knobs for suite generation.
struct SuiteOptions {
  /// Discrete target-speed commands (m/s) drawn uniformly per segment.
  std::vector<double> speed_set{4.0, 6.0, 8.0, 10.0, 12.0};
  /// Lead speed is drawn from [lead_speed_floor, v_target - lead_speed_margin],
  /// with v_target the slowest command on the route.
  double lead_speed_floor = 0.5;
  double lead_speed_margin = 1.0;
  /// Keypoint spacing of generated routes (m).
  double keypoint_spacing = 2.0;
};

/// Dense keypoints for a layout of roughly `length` meters.
std::vector<Vec2> layout_keypoints(Layout layout, double length, double spacing);

/// Deterministic benchmark suite. Four layouts cycle through the configs and
/// every route mixes at least two target speeds. Medium routes get one
/// overtake/follow scenario; Hard routes add a static lane-blocking obstacle
/// ahead of the scenario trigger. Throws InvalidCount when count < 1.
std::vector<ScenarioConfig> generate_suite(Difficulty difficulty, int count, std::uint64_t seed,
                                           const SuiteOptions& options = {});

}  // namespace speedbench
