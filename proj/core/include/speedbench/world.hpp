#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "speedbench/geometry.hpp"
#include "speedbench/route.hpp"
#include "speedbench/scenario_config.hpp"

namespace speedbench {

/// Simulation rate (frames per second).
inline constexpr int kFps = 10;
inline constexpr double kDt = 1.0 / kFps;

/// Actuation and geometry limits shared by the simulator and policies.
struct SimLimits {
  double a_limit = 4.0;     ///< |accel| bound, m/s^2
  double r_limit = 2.0;     ///< |lane_rate| bound, m/s
  double max_offset = 3.5;  ///< |lane_offset| bound, m (one lane)
  double vehicle_length = 4.5;
  double vehicle_width = 2.0;
};

struct VehicleState {
  Vec2 pos{};
  double heading = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double lane_offset = 0.0;  ///< left of centerline is positive
  double s = 0.0;            ///< arc-length coordinate along the route
  double length = 4.5;
  double width = 2.0;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ScenarioOutcome {
  bool triggered = false;
  Behavior commanded = Behavior::Overtake;
  bool ego_finished_ahead = false;
  bool ego_ever_passed = false;
  bool timed_out = false;
  bool collision = false;

  friend bool operator==(const ScenarioOutcome&, const ScenarioOutcome&) = default;
};

enum class Phase { Pending, Active, Done };

struct ScenarioPhase {
  Phase phase = Phase::Pending;
  std::optional<ScenarioOutcome> outcome;
  double activated_at = 0.0;
  double lead_start_s = 0.0;  ///< lead arc-length at spawn

  friend bool operator==(const ScenarioPhase&, const ScenarioPhase&) = default;
};

enum class Termination { Running, RouteComplete, Timeout, Collision };

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view text);

/// Lane-blocking static obstacle in absolute arc-length.
struct ObstacleZone {
  double s_start = 0.0;
  double s_end = 0.0;
  double width = 2.0;
};

struct WorldState {
  double t = 0.0;
  std::int64_t frame = 0;
  VehicleState ego;
  std::optional<VehicleState> lead;
  std::vector<ScenarioPhase> scenarios;
  double active_target_speed = 0.0;
  Behavior active_behavior = Behavior::None;
  int collisions = 0;
  double max_progress = 0.0;  ///< furthest ego arc-length reached
  Termination termination = Termination::Running;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct Command {
  double accel = 0.0;
  double lane_rate = 0.0;
};

/// Route-centric closed-loop world: the ego and a scripted lead live on the
/// route's arc-length/lateral-offset frame. Single-threaded; one instance
/// per episode.
class World {
 public:
  explicit World(const ScenarioConfig& cfg, SimLimits limits = {});

  const WorldState& state() const { return state_; }
  const ScenarioConfig& config() const { return cfg_; }
  const Route& route() const { return route_; }
  const SpeedPlan& plan() const { return plan_; }
  const SimLimits& limits() const { return limits_; }
  std::span<const ObstacleZone> obstacles() const { return obstacles_; }

  /// Global episode time limit: L / (0.3 * default_speed), at least 60 s.
  double time_limit() const { return time_limit_; }
  void set_time_limit(double seconds) { time_limit_ = seconds; }

  bool finished() const { return state_.termination != Termination::Running; }

  /// Advances one frame. Throws InvalidCommand when the command exceeds the
  /// actuation limits and SimEnded once the episode has terminated.
  void step(Command cmd);

  /// Advances one frame with the ego state supplied externally (log
  /// replay). Agents, scenario phases, and termination update as in step().
  void step_replay(const VehicleState& ego);

  /// Outcomes for every configured scenario; Pending ones report
  /// triggered=false.
  std::vector<ScenarioOutcome> outcomes() const;

 private:
  void integrate_ego(Command cmd);
  void update_agents();
  void refresh_commands();
  bool overlaps(const VehicleState& a, const VehicleState& b) const;
  bool hits_obstacle(const VehicleState& ego) const;
  VehicleState make_lead(double s, double speed) const;

  ScenarioConfig cfg_;
  SimLimits limits_;
  Route route_;
  SpeedPlan plan_;
  std::vector<ObstacleZone> obstacles_;
  double time_limit_ = 60.0;
  WorldState state_;
};

/// Same as constructing a World; mirrors the other free-function entry
/// points.
inline World init_world(const ScenarioConfig& cfg, SimLimits limits = {}) { return World(cfg, limits); }

}  // namespace speedbench
