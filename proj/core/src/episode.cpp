#include "speedbench/episode.hpp"

#include <fmt/format.h>

namespace speedbench {

namespace {

TrajectoryLog start_log(const World& world, std::string policy_id) {
  TrajectoryLog log;
  const auto& cfg = world.config();
  log.meta.route_id = cfg.route_id;
  log.meta.seed = cfg.seed;
  log.meta.config_digest = config_digest(cfg);
  log.meta.difficulty = cfg.difficulty;
  log.meta.policy = std::move(policy_id);
  log.frames.push_back(capture_frame(world.state()));
  return log;
}

EpisodeResult finish(const World& world, TrajectoryLog log) {
  EpisodeResult result;
  result.outcomes = world.outcomes();
  result.collisions = world.state().collisions;
  result.termination = world.state().termination;
  log.meta.outcomes = result.outcomes;
  log.meta.collisions = result.collisions;
  log.meta.termination = result.termination;
  result.log = std::move(log);
  return result;
}

World make_world(const ScenarioConfig& cfg, const EpisodeOptions& options) {
  World world(cfg, options.limits);
  if (options.time_limit) world.set_time_limit(*options.time_limit);
  return world;
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig& cfg, Policy& policy, const EpisodeOptions& options) {
  World world = make_world(cfg, options);
  policy.reset();
  TrajectoryLog log = start_log(world, policy.id());

  while (!world.finished()) {
    Command cmd;
    try {
      cmd = policy.decide(observe(world));
    } catch (const std::exception& e) {
      log.meta.termination = world.state().termination;
      throw EpisodeAborted(
          fmt::format("policy '{}' failed on route '{}' at frame {}: {}", policy.id(),
                      cfg.route_id, world.state().frame, e.what()),
          std::move(log));
    }
    world.step(cmd);
    log.frames.push_back(capture_frame(world.state()));
  }
  return finish(world, std::move(log));
}

EpisodeResult replay_episode(const ScenarioConfig& cfg, const TrajectoryLog& source,
                             const EpisodeOptions& options) {
  World world = make_world(cfg, options);
  TrajectoryLog log = start_log(world, source.meta.policy.empty() ? "replay" : source.meta.policy);
  if (!source.frames.empty()) log.frames.front() = source.frames.front();

  const SimLimits& limits = world.limits();
  for (std::size_t i = 1; i < source.frames.size() && !world.finished(); ++i) {
    const LogFrame& f = source.frames[i];
    VehicleState ego;
    ego.pos = f.pos;
    ego.s = f.s;
    ego.speed = f.speed;
    ego.accel = f.accel;
    ego.lane_offset = f.lane_offset;
    ego.heading = f.heading;
    ego.length = limits.vehicle_length;
    ego.width = limits.vehicle_width;
    world.step_replay(ego);
    LogFrame replayed = capture_frame(world.state());
    // The recorded ego samples are authoritative; the world only re-derives
    // agents and scenario phases around them.
    replayed.target_speed = f.target_speed;
    log.frames.push_back(replayed);
  }
  return finish(world, std::move(log));
}

}  // namespace speedbench
