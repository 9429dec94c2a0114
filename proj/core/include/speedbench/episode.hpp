#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speedbench/errors.hpp"
#include "speedbench/route.hpp"
#include "speedbench/trajectory_log.hpp"
#include "speedbench/world.hpp"

namespace speedbench {

/// Everything a policy may look at when choosing a command.
struct Observation {
  const WorldState& world;
  const Route& route;
  const SpeedPlan& plan;
  std::span<const ObstacleZone> obstacles;
  const SimLimits& limits;
};

inline Observation observe(const World& world) {
  return {world.state(), world.route(), world.plan(), world.obstacles(), world.limits()};
}

/// Closed-loop driving policy. Instances hold per-episode state and are not
/// shared across concurrent episodes.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string id() const = 0;
  virtual void reset() {}
  virtual Command decide(const Observation& obs) = 0;
};

/// Outputs zero acceleration and no lane change forever.
class InertPolicy final : public Policy {
 public:
  std::string id() const override { return "inert"; }
  Command decide(const Observation&) override { return {}; }
};

struct EpisodeResult {
  TrajectoryLog log;
  std::vector<ScenarioOutcome> outcomes;
  int collisions = 0;
  Termination termination = Termination::Running;
};

/// Raised when a policy throws mid-episode; carries the frames recorded so
/// far.
class EpisodeAborted : public Error {
 public:
  EpisodeAborted(const std::string& what, TrajectoryLog partial)
      : Error(what), partial_(std::move(partial)) {}
  const TrajectoryLog& partial() const { return partial_; }

 private:
  TrajectoryLog partial_;
};

struct EpisodeOptions {
  /// Overrides the world's global time limit when set.
  std::optional<double> time_limit;
  SimLimits limits{};
};

/// Steps the world with `policy` until the route is complete, the time limit
/// elapses, or a collision ends the episode.
EpisodeResult run_episode(const ScenarioConfig& cfg, Policy& policy, const EpisodeOptions& options = {});

/// Re-drives the world with the ego states recorded in `source` and
/// re-evaluates scenario phases. Frames beyond the source's last frame are
/// not invented; the episode stops where the source stops.
EpisodeResult replay_episode(const ScenarioConfig& cfg, const TrajectoryLog& source,
                             const EpisodeOptions& options = {});

}  // namespace speedbench
