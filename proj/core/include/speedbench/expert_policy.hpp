#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "speedbench/episode.hpp"

namespace speedbench {

/// Intelligent Driver Model constants.
struct IdmParams {
  double a_max = 3.0;      ///< maximum acceleration, m/s^2
  double b_comf = 2.0;     ///< comfortable deceleration, m/s^2
  double s0 = 4.0;         ///< jam distance, m
  double t_headway = 1.2;  ///< desired time headway, s
  double delta = 4.0;      ///< free-road exponent

  friend bool operator==(const IdmParams&, const IdmParams&) = default;
};

struct OvertakeParams {
  double clearance_ahead = 10.0;   ///< extra gap at which a lane change starts, m
  double clearance_return = 5.0;   ///< rear-to-front gap before merging back, m
  double lane_change_rate = 2.0;   ///< lateral speed, m/s

  friend bool operator==(const OvertakeParams&, const OvertakeParams&) = default;
};

struct ExpertParams {
  IdmParams idm;
  OvertakeParams overtake;
  /// Deceleration used to anticipate upcoming lower speed commands, m/s^2.
  /// Zero disables the look-ahead.
  double anticipation_decel = 2.0;

  friend bool operator==(const ExpertParams&, const ExpertParams&) = default;
};

/// Reads flat `key = value` lines (`#` comments). Keys: idm.a_max, idm.b_comf,
/// idm.s0, idm.t_headway, idm.delta, overtake.clearance_ahead,
/// overtake.clearance_return, overtake.lane_change_rate, anticipation_decel.
/// Unset keys keep their defaults. Throws ValidationError on unknown keys,
/// bad numbers, or values that are not positive (delta must be >= 1).
ExpertParams parse_expert_params(std::string_view text);
void validate(const ExpertParams& params);

/// IDM acceleration for speed `v` toward desired speed `v0`. With a leader,
/// `gap` is the bumper-to-bumper distance and `closing` = v - v_leader.
double idm_accel(const IdmParams& p, double v, double v0, std::optional<double> gap = std::nullopt,
                 double closing = 0.0);

/// Rule-based speed-conditioned expert. Tracks the commanded speed with the
/// IDM free-road term, follows a slower lead with the IDM interaction term,
/// and passes it with a shift-out / pass / merge-back maneuver when told to
/// overtake. Static obstacles always trigger the maneuver.
class ExpertPolicy final : public Policy {
 public:
  enum class Maneuver { Keep, ShiftOut, Pass, MergeBack };

  explicit ExpertPolicy(ExpertParams params = {}) : params_(params) { validate(params_); }

  std::string id() const override { return "expert"; }
  void reset() override { maneuver_ = Maneuver::Keep; }
  Command decide(const Observation& obs) override;

  /// Decision with the target speed and behavior given explicitly rather
  /// than read from the world.
  Command decide(const Observation& obs, double target_speed, Behavior behavior);

  Maneuver maneuver() const { return maneuver_; }
  const ExpertParams& params() const { return params_; }

 private:
  ExpertParams params_;
  Maneuver maneuver_ = Maneuver::Keep;
};

/// Tracks a fixed cruise speed with the same IDM law, ignoring speed
/// commands; it still follows a lead in its lane. A non-conditioned baseline.
class FixedSpeedPolicy final : public Policy {
 public:
  explicit FixedSpeedPolicy(double cruise_speed, IdmParams idm = {})
      : cruise_speed_(cruise_speed), idm_(idm) {}
  std::string id() const override;
  Command decide(const Observation& obs) override;

 private:
  double cruise_speed_;
  IdmParams idm_;
};

/// Expert longitudinal control that never leaves its lane regardless of the
/// overtake command.
class LaneKeepingPolicy final : public Policy {
 public:
  explicit LaneKeepingPolicy(ExpertParams params = {}) : expert_(params) {}
  std::string id() const override { return "lane_keeping"; }
  void reset() override { expert_.reset(); }
  Command decide(const Observation& obs) override;

 private:
  ExpertPolicy expert_;
};

}  // namespace speedbench
