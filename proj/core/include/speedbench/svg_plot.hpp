#pragma once

#include <string>
#include <vector>

#include "speedbench/geometry.hpp"
#include "speedbench/route.hpp"
#include "speedbench/trajectory_log.hpp"

namespace speedbench {

struct PlotOptions {
  int width = 900;
  int height = 420;
  std::string title;
};

/// Line chart of actual and commanded speed (m/s) against arc-length (m).
/// Both curves are sampled at each frame's projected arc-length, so a log
/// that tracks its plan exactly draws two coincident polylines.
std::string speed_profile_svg(const TrajectoryLog& log, const Route& route, const SpeedPlan& plan,
                              const PlotOptions& options = {});

}  // namespace speedbench
