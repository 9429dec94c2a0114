#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "speedbench/route.hpp"
#include "speedbench/scenario_config.hpp"
#include "speedbench/trajectory_log.hpp"

namespace speedbench {

/// How frames constrained by a slower lead under Follow are scored.
enum class Softening {
  Off,      ///< plain exponential penalty
  Full,     ///< score 1 (default)
  Partial,  ///< penalty strength halved
};

struct ComfortLimits {
  double a_max = 4.0;  ///< m/s^2
  double j_max = 8.0;  ///< m/s^3
};

struct MetricConfig {
  double alpha = 3.0;     ///< penalty strength
  double epsilon = 0.1;   ///< target-speed floor, m/s
  ComfortLimits comfort;
  Softening softening = Softening::Full;
};

/// Throws ValidationError unless alpha > 0 and epsilon > 0.
void validate(const MetricConfig& cfg);

struct FrameScore {
  double s = 0.0;         ///< projected arc-length
  double w = 0.0;         ///< distance from the previous frame
  double v_actual = 0.0;
  double v_target = 0.0;
  double e = 0.0;         ///< relative speed error
  double score = 1.0;     ///< per-frame score in (0, 1]
  bool softened = false;
};

struct SpeedAdherenceBreakdown {
  std::vector<FrameScore> frames;  ///< one per log frame; the first has w = 0
  double total = 0.0;              ///< [0, 100]
};

/// Distance-weighted exponential speed-error score.
///
/// Each frame is projected onto the route, its target read from the plan at
/// that arc-length, and scored exp(-alpha * |v - v_target| / max(v_target,
/// epsilon)). Frames are weighted by the distance travelled since the
/// previous frame, so standing still contributes nothing; a log that never
/// moves scores 0. Throws EmptyLog for fewer than two frames.
SpeedAdherenceBreakdown speed_adherence(const TrajectoryLog& log, const Route& route,
                                        const SpeedPlan& plan, const MetricConfig& cfg);

/// Whether one scenario counts as a success: triggered, and for Overtake the
/// ego finished ahead, for Follow it never passed and never collided.
bool scenario_succeeded(const ScenarioOutcome& outcome);

/// Mean of 100/0 per scenario; nullopt when there are none.
std::optional<double> overtake_score(std::span<const ScenarioOutcome> outcomes);

struct AuxiliaryScores {
  double route_completion = 0.0;  ///< [0, 100]
  double safety_penalty = 1.0;    ///< 0.6^collisions
  double driving_score = 0.0;     ///< completion * penalty
  double efficiency = 0.0;        ///< 100 * weighted mean actual / weighted mean target
  double comfort = 0.0;           ///< percent of frames inside accel/jerk limits
};

AuxiliaryScores auxiliary_scores(const TrajectoryLog& log, const Route& route, const SpeedPlan& plan,
                                 int collisions, const MetricConfig& cfg);

struct ScoreReport {
  double speed_adherence = 0.0;
  std::optional<double> overtake;
  double route_completion = 0.0;
  double safety_penalty = 1.0;
  double driving_score = 0.0;
  double efficiency = 0.0;
  double comfort = 0.0;
  int collisions = 0;
  bool success = false;  ///< full completion with no collision
};

/// Scores one episode log against its route config. Scenario outcomes and
/// collisions come from the log's meta record.
ScoreReport score_episode(const TrajectoryLog& log, const ScenarioConfig& cfg, const MetricConfig& metric);

/// Unweighted means over one difficulty bucket (or all routes).
struct BucketSummary {
  int count = 0;
  double speed_adherence = 0.0;
  std::optional<double> overtake;  ///< over routes that carry scenarios
  double driving_score = 0.0;
  double success_rate = 0.0;
  double route_completion = 0.0;
  double efficiency = 0.0;
  double comfort = 0.0;
};

struct Rollup {
  BucketSummary all;
  BucketSummary easy;
  BucketSummary medium;
  BucketSummary hard;
};

/// Per-difficulty and overall means. The overall overtake score averages
/// over routes that have scenarios, so Easy routes never dilute it.
Rollup aggregate(std::span<const std::pair<Difficulty, ScoreReport>> reports);

/// Header plus one row; every metric is laid out as A, E, M, H columns.
/// Empty buckets and missing overtake values print as N/A.
std::string rollup_csv(const Rollup& rollup, const std::string& label);

}  // namespace speedbench
