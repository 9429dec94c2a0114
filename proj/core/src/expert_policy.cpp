#include "speedbench/expert_policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace {

constexpr double kLateralMargin = 0.3;
constexpr double kMinGap = 0.01;

/// Something occupying the ego's home lane ahead of it.
struct Blocker {
  double s_rear;   ///< arc-length of its rear edge
  double s_front;  ///< arc-length of its front edge
  double speed;
  double lane_offset;
  double width;
  bool is_obstacle;
};

std::vector<Blocker> blockers_of(const Observation& obs) {
  std::vector<Blocker> out;
  if (const auto& lead = obs.world.lead) {
    out.push_back({lead->s - 0.5 * lead->length, lead->s + 0.5 * lead->length, lead->speed,
                   lead->lane_offset, lead->width, false});
  }
  for (const auto& z : obs.obstacles) {
    out.push_back({z.s_start, z.s_end, 0.0, 0.0, z.width, true});
  }
  return out;
}

bool laterally_overlaps(const VehicleState& ego, const Blocker& b) {
  return std::abs(ego.lane_offset - b.lane_offset) < 0.5 * (ego.width + b.width) + kLateralMargin;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

double idm_accel(const IdmParams& p, double v, double v0, std::optional<double> gap, double closing) {
  double free_term = 0.0;
  if (v0 > 0.0) {
    free_term = 1.0 - std::pow(v / v0, p.delta);
  } else if (v > 0.0) {
    free_term = -1e6;  // stop request; caller clamps
  }
  double interaction = 0.0;
  if (gap) {
    const double desired =
        p.s0 + std::max(0.0, v * p.t_headway + v * closing / (2.0 * std::sqrt(p.a_max * p.b_comf)));
    const double ratio = desired / std::max(*gap, kMinGap);
    interaction = ratio * ratio;
  }
  return p.a_max * (free_term - interaction);
}

void validate(const ExpertParams& params) {
  const auto& i = params.idm;
  const auto& o = params.overtake;
  if (!(i.a_max > 0 && i.b_comf > 0 && i.s0 > 0 && i.t_headway > 0 && i.delta >= 1.0)) {
    throw ValidationError("IDM parameters must be positive with delta >= 1");
  }
  if (!(o.clearance_ahead > 0 && o.clearance_return > 0 && o.lane_change_rate > 0)) {
    throw ValidationError("overtake clearances and lane change rate must be positive");
  }
  if (!(params.anticipation_decel >= 0.0)) {
    throw ValidationError("anticipation_decel must be >= 0");
  }
}

ExpertParams parse_expert_params(std::string_view text) {
  ExpertParams p;
  const std::pair<std::string_view, double*> keys[] = {
      {"idm.a_max", &p.idm.a_max},
      {"idm.b_comf", &p.idm.b_comf},
      {"idm.s0", &p.idm.s0},
      {"idm.t_headway", &p.idm.t_headway},
      {"idm.delta", &p.idm.delta},
      {"overtake.clearance_ahead", &p.overtake.clearance_ahead},
      {"overtake.clearance_return", &p.overtake.clearance_return},
      {"overtake.lane_change_rate", &p.overtake.lane_change_rate},
      {"anticipation_decel", &p.anticipation_decel},
  };
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(fmt::format("params line {}: expected key = value", line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    double* slot = nullptr;
    for (const auto& [name, ptr] : keys) {
      if (name == key) slot = ptr;
    }
    if (slot == nullptr) throw ValidationError(fmt::format("params line {}: unknown key '{}'", line_no, key));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty()) {
      throw ValidationError(fmt::format("params line {}: '{}' is not a number", line_no, raw));
    }
    *slot = value;
  }
  validate(p);
  return p;
}

Command ExpertPolicy::decide(const Observation& obs) {
  return decide(obs, obs.world.active_target_speed, obs.world.active_behavior);
}

Command ExpertPolicy::decide(const Observation& obs, double target_speed, Behavior behavior) {
  const VehicleState& ego = obs.world.ego;
  const IdmParams& idm = params_.idm;
  const OvertakeParams& ot = params_.overtake;
  const double v = ego.speed;
  const double ego_front = ego.s + 0.5 * ego.length;
  const double ego_rear = ego.s - 0.5 * ego.length;

  // Look ahead along the plan so lower commands are reached at their
  // boundary instead of after it.
  double v0 = std::max(0.0, target_speed);
  if (params_.anticipation_decel > 0.0) {
    const double b = params_.anticipation_decel;
    const double horizon = v * v / (2.0 * b) + 2.0 * v + 5.0;
    const auto cum = obs.plan.cum_dist();
    const auto speeds = obs.plan.speeds();
    const auto first = std::upper_bound(cum.begin(), cum.end(), ego.s);
    for (auto it = first; it != cum.end() && *it <= ego.s + horizon; ++it) {
      const auto k = static_cast<std::size_t>(it - cum.begin());
      if (k == 0 || speeds[k] >= v0) continue;
      const double boundary = 0.5 * (cum[k - 1] + cum[k]);
      const double dist = std::max(0.0, boundary - ego.s);
      v0 = std::min(v0, std::sqrt(speeds[k] * speeds[k] + 2.0 * b * dist));
    }
  }

  const std::vector<Blocker> blockers = blockers_of(obs);
  const double shift_time = obs.limits.max_offset / ot.lane_change_rate;
  const auto must_pass = [&](const Blocker& b) {
    return b.is_obstacle || (behavior == Behavior::Overtake && b.speed < v0);
  };
  // A blocker close enough ahead that the maneuver should start now.
  const auto pending_pass = [&]() {
    return std::any_of(blockers.begin(), blockers.end(), [&](const Blocker& b) {
      const double gap = b.s_rear - ego_front;
      return must_pass(b) && b.s_front > ego_rear && gap < ot.clearance_ahead + v * shift_time;
    });
  };
  const auto passed_all = [&]() {
    return std::none_of(blockers.begin(), blockers.end(), [&](const Blocker& b) {
      return must_pass(b) && ego_rear - b.s_front < ot.clearance_return &&
             b.s_rear - ego_front < ot.clearance_ahead + v * shift_time;
    });
  };

  switch (maneuver_) {
    case Maneuver::Keep:
      if (pending_pass()) maneuver_ = Maneuver::ShiftOut;
      break;
    case Maneuver::ShiftOut:
      if (ego.lane_offset >= obs.limits.max_offset - 1e-6) maneuver_ = Maneuver::Pass;
      break;
    case Maneuver::Pass:
      if (passed_all()) maneuver_ = Maneuver::MergeBack;
      break;
    case Maneuver::MergeBack:
      if (pending_pass()) {
        maneuver_ = Maneuver::ShiftOut;
      } else if (ego.lane_offset <= 1e-6) {
        maneuver_ = Maneuver::Keep;
      }
      break;
  }

  const bool out_lane = maneuver_ == Maneuver::ShiftOut || maneuver_ == Maneuver::Pass;
  const double lane_goal = out_lane ? obs.limits.max_offset : 0.0;
  const double rate_limit = std::min(ot.lane_change_rate, obs.limits.r_limit);
  const double lane_rate = std::clamp((lane_goal - ego.lane_offset) / kDt, -rate_limit, rate_limit);

  double accel = idm_accel(idm, v, v0);
  for (const Blocker& b : blockers) {
    if (b.s_front <= ego_rear || !laterally_overlaps(ego, b)) continue;
    const double gap = b.s_rear - ego_front;
    if (gap < -0.5 * ego.length) continue;  // alongside, handled laterally
    accel = std::min(accel, idm_accel(idm, v, v0, gap, v - b.speed));
  }
  accel = std::clamp(accel, -obs.limits.a_limit, obs.limits.a_limit);
  return {accel, lane_rate};
}

std::string FixedSpeedPolicy::id() const { return fmt::format("fixed_speed:{:g}", cruise_speed_); }

Command FixedSpeedPolicy::decide(const Observation& obs) {
  const VehicleState& ego = obs.world.ego;
  double accel = idm_accel(idm_, ego.speed, cruise_speed_);
  const auto consider = [&](double rear, double speed, double lane_offset, double width) {
    if (std::abs(ego.lane_offset - lane_offset) >= 0.5 * (ego.width + width) + kLateralMargin) return;
    const double gap = rear - (ego.s + 0.5 * ego.length);
    if (gap < -0.5 * ego.length) return;
    accel = std::min(accel, idm_accel(idm_, ego.speed, cruise_speed_, gap, ego.speed - speed));
  };
  if (const auto& lead = obs.world.lead) {
    consider(lead->s - 0.5 * lead->length, lead->speed, lead->lane_offset, lead->width);
  }
  for (const auto& z : obs.obstacles) {
    if (z.s_end > ego.s - 0.5 * ego.length) consider(z.s_start, 0.0, 0.0, z.width);
  }
  return {std::clamp(accel, -obs.limits.a_limit, obs.limits.a_limit), 0.0};
}

Command LaneKeepingPolicy::decide(const Observation& obs) {
  Command cmd = expert_.decide(obs, obs.world.active_target_speed, Behavior::Follow);
  cmd.lane_rate = 0.0;
  return cmd;
}

}  // namespace speedbench
