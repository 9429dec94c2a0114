#include "speedbench/world.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace {

constexpr double kCommandSlack = 1e-9;

double heading_of(Vec2 v) { return std::atan2(v.y, v.x); }

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::RouteComplete: return "route_complete";
    case Termination::Timeout: return "timeout";
    case Termination::Collision: return "collision";
  }
  return "running";
}

Termination parse_termination(std::string_view text) {
  if (text == "running") return Termination::Running;
  if (text == "route_complete") return Termination::RouteComplete;
  if (text == "timeout") return Termination::Timeout;
  if (text == "collision") return Termination::Collision;
  throw ValidationError(fmt::format("unknown termination '{}'", text));
}

World::World(const ScenarioConfig& cfg, SimLimits limits)
    : cfg_(cfg),
      limits_(limits),
      route_(Route::build(cfg.waypoints)),
      plan_(SpeedPlan::build(route_, cfg.speed_segments, cfg.default_speed)) {
  validate_config(cfg_);
  const double length = route_.total_length();
  for (const auto& ob : cfg_.obstacles) {
    obstacles_.push_back({ob.s_start * length, ob.s_end * length, limits_.vehicle_width});
  }
  if (cfg_.default_speed > 0.0) {
    time_limit_ = std::max(60.0, length / (0.3 * cfg_.default_speed));
  }

  VehicleState& ego = state_.ego;
  ego.pos = route_.point_at(0.0);
  ego.heading = heading_of(route_.tangent_at(0.0));
  ego.length = limits_.vehicle_length;
  ego.width = limits_.vehicle_width;
  state_.scenarios.resize(cfg_.scenarios.size());
  refresh_commands();
}

void World::step(Command cmd) {
  if (finished()) {
    throw SimEnded(fmt::format("episode '{}' already ended ({})", cfg_.route_id,
                               to_string(state_.termination)));
  }
  if (!std::isfinite(cmd.accel) || !std::isfinite(cmd.lane_rate) ||
      std::abs(cmd.accel) > limits_.a_limit + kCommandSlack ||
      std::abs(cmd.lane_rate) > limits_.r_limit + kCommandSlack) {
    throw InvalidCommand(fmt::format("command (accel={}, lane_rate={}) exceeds limits ({}, {})",
                                     cmd.accel, cmd.lane_rate, limits_.a_limit, limits_.r_limit));
  }
  integrate_ego(cmd);
  update_agents();
}

void World::step_replay(const VehicleState& ego) {
  if (finished()) {
    throw SimEnded(fmt::format("episode '{}' already ended ({})", cfg_.route_id,
                               to_string(state_.termination)));
  }
  state_.ego = ego;
  update_agents();
}

void World::integrate_ego(Command cmd) {
  VehicleState& ego = state_.ego;
  const double v0 = ego.speed;
  const double v1 = std::max(0.0, v0 + cmd.accel * kDt);
  const double budget = 0.5 * (v0 + v1) * kDt;

  // Lateral motion shares the travelled distance with progress along the
  // route, so a stopped vehicle cannot slide sideways.
  const double lane_goal =
      std::clamp(ego.lane_offset + cmd.lane_rate * kDt, -limits_.max_offset, limits_.max_offset);
  double dd = lane_goal - ego.lane_offset;
  if (std::abs(dd) > budget) dd = std::copysign(budget, dd);
  const double lateral = ego.lane_offset + dd;

  const Vec2 start = route_.offset_point(ego.s, ego.lane_offset);
  const auto reach = [&](double ds) { return distance(start, route_.offset_point(ego.s + ds, lateral)); };

  double ds = std::sqrt(std::max(0.0, budget * budget - dd * dd));
  if (reach(ds) > budget * (1.0 + 1e-12)) {
    // Offset paths on the outside of a bend are longer than the centerline.
    double lo = 0.0;
    double hi = ds;
    for (int i = 0; i < 48; ++i) {
      const double mid = 0.5 * (lo + hi);
      (reach(mid) <= budget ? lo : hi) = mid;
    }
    ds = lo;
  }

  const Vec2 next = route_.offset_point(ego.s + ds, lateral);
  const Vec2 delta = next - ego.pos;
  ego.heading = squared_norm(delta) > 1e-18 ? heading_of(delta) : heading_of(route_.tangent_at(ego.s + ds));
  ego.pos = next;
  ego.s += ds;
  ego.lane_offset = lateral;
  ego.accel = (v1 - v0) / kDt;
  ego.speed = v1;
}

VehicleState World::make_lead(double s, double speed) const {
  VehicleState lead;
  lead.s = s;
  lead.pos = route_.point_at(s);
  lead.heading = heading_of(route_.tangent_at(s));
  lead.speed = speed;
  lead.length = limits_.vehicle_length;
  lead.width = limits_.vehicle_width;
  return lead;
}

bool World::overlaps(const VehicleState& a, const VehicleState& b) const {
  return std::abs(a.s - b.s) < 0.5 * (a.length + b.length) &&
         std::abs(a.lane_offset - b.lane_offset) < 0.5 * (a.width + b.width);
}

bool World::hits_obstacle(const VehicleState& ego) const {
  const double front = ego.s + 0.5 * ego.length;
  const double rear = ego.s - 0.5 * ego.length;
  return std::any_of(obstacles_.begin(), obstacles_.end(), [&](const ObstacleZone& z) {
    return rear < z.s_end && front > z.s_start &&
           std::abs(ego.lane_offset) < 0.5 * (ego.width + z.width);
  });
}

void World::update_agents() {
  ++state_.frame;
  state_.t = static_cast<double>(state_.frame) / kFps;
  const double length = route_.total_length();
  const VehicleState& ego = state_.ego;
  state_.max_progress = std::max(state_.max_progress, std::clamp(ego.s, 0.0, length));

  std::optional<std::size_t> active;
  for (std::size_t i = 0; i < state_.scenarios.size(); ++i) {
    if (state_.scenarios[i].phase == Phase::Active) active = i;
  }

  if (active && state_.lead) {
    const auto& spec = cfg_.scenarios[*active];
    ScenarioPhase& phase = state_.scenarios[*active];
    const double elapsed = state_.t - phase.activated_at;
    // Lead position is a closed-form function of its spawn, not accumulated.
    state_.lead = make_lead(phase.lead_start_s + spec.lead_speed * elapsed, spec.lead_speed);

    ScenarioOutcome& out = *phase.outcome;
    if (ego.s > state_.lead->s) out.ego_ever_passed = true;
    if (overlaps(ego, *state_.lead)) {
      out.collision = true;
      ++state_.collisions;
      state_.termination = Termination::Collision;
    }
    if (ego.s - state_.lead->s > ego.length) {
      out.ego_finished_ahead = true;
      phase.phase = Phase::Done;
    } else if (elapsed > spec.timeout) {
      out.timed_out = true;
      phase.phase = Phase::Done;
    }
    if (phase.phase == Phase::Done) {
      state_.lead.reset();
      active.reset();
    }
  }

  if (!active && state_.termination == Termination::Running) {
    for (std::size_t i = 0; i < state_.scenarios.size(); ++i) {
      ScenarioPhase& phase = state_.scenarios[i];
      const auto& spec = cfg_.scenarios[i];
      if (phase.phase != Phase::Pending || ego.s < spec.trigger_progress * length) continue;
      phase.phase = Phase::Active;
      phase.activated_at = state_.t;
      phase.lead_start_s = ego.s + spec.spawn_distance;
      phase.outcome = ScenarioOutcome{.triggered = true, .commanded = spec.behavior};
      state_.lead = make_lead(phase.lead_start_s, spec.lead_speed);
      active = i;
      break;
    }
  }

  if (hits_obstacle(ego)) {
    ++state_.collisions;
    state_.termination = Termination::Collision;
    if (active) state_.scenarios[*active].outcome->collision = true;
  }

  if (state_.termination == Termination::Running) {
    if (ego.s >= length) {
      state_.termination = Termination::RouteComplete;
    } else if (state_.t >= time_limit_) {
      state_.termination = Termination::Timeout;
    }
  }
  if (state_.termination != Termination::Running) {
    for (auto& phase : state_.scenarios) {
      if (phase.phase == Phase::Active) phase.phase = Phase::Done;
    }
  }
  refresh_commands();
}

void World::refresh_commands() {
  state_.active_target_speed = plan_.query(state_.ego.pos);
  state_.active_behavior = Behavior::None;
  for (std::size_t i = 0; i < state_.scenarios.size(); ++i) {
    if (state_.scenarios[i].phase == Phase::Active) {
      state_.active_behavior = cfg_.scenarios[i].behavior;
    }
  }
}

std::vector<ScenarioOutcome> World::outcomes() const {
  std::vector<ScenarioOutcome> result;
  result.reserve(cfg_.scenarios.size());
  for (std::size_t i = 0; i < cfg_.scenarios.size(); ++i) {
    const auto& phase = state_.scenarios[i];
    result.push_back(phase.outcome.value_or(
        ScenarioOutcome{.triggered = false, .commanded = cfg_.scenarios[i].behavior}));
  }
  return result;
}

}  // namespace speedbench
