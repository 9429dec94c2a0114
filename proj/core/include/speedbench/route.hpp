#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "speedbench/geometry.hpp"

namespace speedbench {

/// Polyline route parameterized by cumulative arc-length.
///
/// Keypoints are stored with their cumulative distance from the first
/// keypoint; the first distance is zero and the last equals the total length.
/// Instances are immutable once built.
class Route {
 public:
  /// Throws DegenerateRoute for fewer than two keypoints or a zero-length
  /// segment.
  static Route build(std::vector<Vec2> keypoints);

  std::span<const Vec2> keypoints() const { return keypoints_; }
  std::span<const double> cum_dist() const { return cum_dist_; }
  std::size_t size() const { return keypoints_.size(); }
  double total_length() const { return cum_dist_.back(); }

  /// Arc-length of the closest point on the polyline. Each segment is
  /// projected orthogonally and clamped to its endpoints; on ties the smaller
  /// arc-length wins.
  double project(Vec2 pos) const;

  /// Centerline point at arc-length `s`. Values outside [0, L] extrapolate
  /// along the first or last segment.
  Vec2 point_at(double s) const;

  /// Unit tangent of the segment containing `s`.
  Vec2 tangent_at(double s) const;

  /// Point displaced `lateral` meters to the left of the centerline at `s`.
  /// The normal is blended between vertex bisectors so the offset curve is
  /// continuous across keypoints.
  Vec2 offset_point(double s, double lateral) const;

  /// Index of the segment [k, k+1] containing `s` (clamped to valid range).
  std::size_t segment_index(double s) const;

 private:
  Route() = default;

  std::vector<Vec2> keypoints_;
  std::vector<double> cum_dist_;
  std::vector<Vec2> vertex_normals_;
};

/// A target speed for the normalized progress interval [s_start, s_end).
struct SpeedSegment {
  double s_start = 0.0;
  double s_end = 1.0;
  double v = 0.0;

  friend bool operator==(const SpeedSegment&, const SpeedSegment&) = default;
};

/// Per-keypoint target speeds for a route.
class SpeedPlan {
 public:
  /// Assigns each keypoint the speed of the segment whose absolute interval
  /// [s_start*L, s_end*L) contains its arc-length. A segment ending at 1
  /// also claims the final keypoint. Keypoints outside every segment inherit
  /// the previous keypoint's speed, or `default_v` before the first segment.
  ///
  /// Throws ValidationError for malformed segments and OverlappingSegments
  /// when two absolute intervals intersect.
  static SpeedPlan build(const Route& route, std::span<const SpeedSegment> segments,
                         double default_v);

  std::span<const Vec2> keypoints() const { return keypoints_; }
  std::span<const double> cum_dist() const { return cum_dist_; }
  std::span<const double> speeds() const { return speeds_; }
  std::size_t size() const { return speeds_.size(); }

  /// Runtime query: speed of the Euclidean-nearest keypoint, smallest index
  /// on ties.
  double query(Vec2 pos) const;

  /// Speed of the keypoint nearest in arc-length to `s`, smallest index on
  /// ties. This is the metric-side view of the same plan.
  double speed_at(double s) const;

 private:
  SpeedPlan() = default;

  std::vector<Vec2> keypoints_;
  std::vector<double> cum_dist_;
  std::vector<double> speeds_;
};

inline Route build_route(std::vector<Vec2> keypoints) { return Route::build(std::move(keypoints)); }

inline SpeedPlan build_speed_plan(const Route& route, std::span<const SpeedSegment> segments,
                                  double default_v) {
  return SpeedPlan::build(route, segments, default_v);
}

inline double query_target_speed(const SpeedPlan& plan, Vec2 ego_pos) { return plan.query(ego_pos); }

inline double project_to_route(const Route& route, Vec2 pos) { return route.project(pos); }

}  // namespace speedbench
