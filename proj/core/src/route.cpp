#include "speedbench/route.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

Route Route::build(std::vector<Vec2> keypoints) {
  if (keypoints.size() < 2) {
    throw DegenerateRoute(fmt::format("route needs at least 2 keypoints, got {}", keypoints.size()));
  }
  Route route;
  route.cum_dist_.reserve(keypoints.size());
  route.cum_dist_.push_back(0.0);
  std::vector<Vec2> seg_normals;
  seg_normals.reserve(keypoints.size() - 1);
  for (std::size_t k = 1; k < keypoints.size(); ++k) {
    const Vec2 a = keypoints[k - 1];
    const Vec2 b = keypoints[k];
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw DegenerateRoute(fmt::format("non-finite keypoint near index {}", k));
    }
    const double len = distance(a, b);
    if (!(len > 0.0)) {
      throw DegenerateRoute(fmt::format("zero-length segment between keypoints {} and {}", k - 1, k));
    }
    route.cum_dist_.push_back(route.cum_dist_.back() + len);
    seg_normals.push_back(left_normal((b - a) * (1.0 / len)));
  }

  route.vertex_normals_.resize(keypoints.size());
  route.vertex_normals_.front() = seg_normals.front();
  route.vertex_normals_.back() = seg_normals.back();
  for (std::size_t k = 1; k + 1 < keypoints.size(); ++k) {
    const Vec2 bisector = normalized(seg_normals[k - 1] + seg_normals[k]);
    route.vertex_normals_[k] = squared_norm(bisector) > 0.0 ? bisector : seg_normals[k];
  }
  route.keypoints_ = std::move(keypoints);
  return route;
}

std::size_t Route::segment_index(double s) const {
  const auto it = std::upper_bound(cum_dist_.begin(), cum_dist_.end(), s);
  const auto idx = static_cast<std::ptrdiff_t>(it - cum_dist_.begin()) - 1;
  const auto last = static_cast<std::ptrdiff_t>(keypoints_.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, last));
}

double Route::project(Vec2 pos) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t k = 0; k + 1 < keypoints_.size(); ++k) {
    const Vec2 a = keypoints_[k];
    const Vec2 ab = keypoints_[k + 1] - a;
    const double len2 = squared_norm(ab);
    const double t = std::clamp(dot(pos - a, ab) / len2, 0.0, 1.0);
    const double d2 = squared_norm(pos - (a + ab * t));
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = t >= 1.0 ? cum_dist_[k + 1] : cum_dist_[k] + t * std::sqrt(len2);
    }
  }
  return best_s;
}

Vec2 Route::point_at(double s) const {
  const std::size_t k = segment_index(s);
  if (s == cum_dist_[k]) return keypoints_[k];
  if (s == cum_dist_[k + 1]) return keypoints_[k + 1];
  const Vec2 a = keypoints_[k];
  const Vec2 ab = keypoints_[k + 1] - a;
  const double t = (s - cum_dist_[k]) / (cum_dist_[k + 1] - cum_dist_[k]);
  return a + ab * t;
}

Vec2 Route::tangent_at(double s) const {
  const std::size_t k = segment_index(s);
  return normalized(keypoints_[k + 1] - keypoints_[k]);
}

Vec2 Route::offset_point(double s, double lateral) const {
  const Vec2 base = point_at(s);
  if (lateral == 0.0) return base;
  const std::size_t k = segment_index(s);
  const double t =
      std::clamp((s - cum_dist_[k]) / (cum_dist_[k + 1] - cum_dist_[k]), 0.0, 1.0);
  const Vec2 n = normalized(vertex_normals_[k] * (1.0 - t) + vertex_normals_[k + 1] * t);
  return base + n * lateral;
}

SpeedPlan SpeedPlan::build(const Route& route, std::span<const SpeedSegment> segments,
                           double default_v) {
  if (!std::isfinite(default_v) || default_v < 0.0) {
    throw ValidationError(fmt::format("default speed must be finite and >= 0, got {}", default_v));
  }
  std::vector<SpeedSegment> sorted(segments.begin(), segments.end());
  for (const auto& seg : sorted) {
    if (!(seg.s_start >= 0.0 && seg.s_start < seg.s_end && seg.s_end <= 1.0)) {
      throw ValidationError(
          fmt::format("speed segment [{}, {}) is not a valid sub-interval of [0, 1]", seg.s_start,
                      seg.s_end));
    }
    if (!std::isfinite(seg.v) || seg.v < 0.0) {
      throw ValidationError(fmt::format("speed segment target {} must be finite and >= 0", seg.v));
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SpeedSegment& a, const SpeedSegment& b) { return a.s_start < b.s_start; });

  const double length = route.total_length();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].s_start * length < sorted[i - 1].s_end * length) {
      throw OverlappingSegments(fmt::format("speed segments [{}, {}) and [{}, {}) overlap",
                                            sorted[i - 1].s_start, sorted[i - 1].s_end,
                                            sorted[i].s_start, sorted[i].s_end));
    }
  }

  SpeedPlan plan;
  plan.keypoints_.assign(route.keypoints().begin(), route.keypoints().end());
  plan.cum_dist_.assign(route.cum_dist().begin(), route.cum_dist().end());
  plan.speeds_.resize(plan.keypoints_.size());

  double carried = default_v;
  std::size_t next = 0;  // segments are sorted and disjoint, so sweep once
  for (std::size_t k = 0; k < plan.keypoints_.size(); ++k) {
    const double d = plan.cum_dist_[k];
    while (next < sorted.size() && sorted[next].s_end < 1.0 && d >= sorted[next].s_end * length) {
      ++next;
    }
    if (next < sorted.size()) {
      const auto& seg = sorted[next];
      const bool closed_end = seg.s_end >= 1.0;
      const bool inside =
          d >= seg.s_start * length && (d < seg.s_end * length || (closed_end && d <= length));
      if (inside) carried = seg.v;
    }
    plan.speeds_[k] = carried;
  }
  return plan;
}

double SpeedPlan::query(Vec2 pos) const {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < keypoints_.size(); ++k) {
    const double d2 = squared_norm(pos - keypoints_[k]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return speeds_[best];
}

double SpeedPlan::speed_at(double s) const {
  const auto it = std::lower_bound(cum_dist_.begin(), cum_dist_.end(), s);
  if (it == cum_dist_.begin()) return speeds_.front();
  if (it == cum_dist_.end()) return speeds_.back();
  const auto hi = static_cast<std::size_t>(it - cum_dist_.begin());
  const std::size_t lo = hi - 1;
  // Ties go to the smaller index.
  return (s - cum_dist_[lo] <= cum_dist_[hi] - s) ? speeds_[lo] : speeds_[hi];
}

}  // namespace speedbench
