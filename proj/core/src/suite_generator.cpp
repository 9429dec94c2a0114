#include "speedbench/suite_generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Constant-curvature piece; curvature 0 is a straight.
struct Piece {
  double length;
  double curvature;
};

std::vector<Piece> pieces_for(Layout layout, double length) {
  std::vector<Piece> cycle;
  switch (layout) {
    case Layout::StraightUrban:
      return {{length, 0.0}};
    case Layout::LeftTurnUrban: {
      const double radius = 18.0;
      const double arc = radius * 90.0 * kDegToRad;
      const double lead_in = 0.35 * length;
      return {{lead_in, 0.0}, {arc, 1.0 / radius}, {std::max(length - lead_in - arc, 10.0), 0.0}};
    }
    case Layout::RightTurnRural: {
      const double radius = 25.0;
      const double arc = radius * 90.0 * kDegToRad;
      const double lead_in = 0.35 * length;
      return {{lead_in, 0.0}, {arc, -1.0 / radius}, {std::max(length - lead_in - arc, 10.0), 0.0}};
    }
    case Layout::WideStreet: {
      const double radius = 400.0;
      const double arc = radius * 8.0 * kDegToRad;
      cycle = {{120.0, 0.0}, {arc, 1.0 / radius}, {120.0, 0.0}, {arc, -1.0 / radius}};
      break;
    }
    case Layout::RuralCurving: {
      const double radius = 80.0;
      const double arc = radius * 35.0 * kDegToRad;
      cycle = {{30.0, 0.0}, {arc, 1.0 / radius}, {30.0, 0.0}, {arc, -1.0 / radius}};
      break;
    }
  }
  std::vector<Piece> pieces;
  double total = 0.0;
  for (std::size_t i = 0; total < length; ++i) {
    Piece p = cycle[i % cycle.size()];
    p.length = std::min(p.length, length - total);
    pieces.push_back(p);
    total += p.length;
  }
  return pieces;
}

double quantize(double v) { return std::round(v * 1e6) / 1e6; }

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::array<Layout, 4> kEasyLayouts{Layout::RuralCurving, Layout::LeftTurnUrban,
                                             Layout::StraightUrban, Layout::WideStreet};
constexpr std::array<Layout, 4> kMediumLayouts{Layout::RuralCurving, Layout::WideStreet,
                                               Layout::RightTurnRural, Layout::StraightUrban};
constexpr std::array<Layout, 4> kHardLayouts{Layout::WideStreet, Layout::WideStreet,
                                             Layout::RightTurnRural, Layout::LeftTurnUrban};

constexpr std::array<std::string_view, 8> kWeathers{
    "ClearNoon", "CloudyNoon", "WetNoon", "SoftRainNoon",
    "ClearSunset", "CloudySunset", "WetCloudyNight", "HardRainNight"};

std::vector<SpeedSegment> sample_segments(std::mt19937_64& rng, const SuiteOptions& options) {
  const std::size_t count = 2 + pick(rng, 3);
  std::vector<double> speeds(count);
  for (auto& v : speeds) v = options.speed_set[pick(rng, options.speed_set.size())];
  if (std::all_of(speeds.begin(), speeds.end(), [&](double v) { return v == speeds.front(); })) {
    // Force within-route variability: shift the last command to another value.
    const auto it = std::find(options.speed_set.begin(), options.speed_set.end(), speeds.back());
    const auto idx = static_cast<std::size_t>(it - options.speed_set.begin());
    speeds.back() = options.speed_set[(idx + 1 + pick(rng, options.speed_set.size() - 1)) %
                                      options.speed_set.size()];
  }

  std::vector<double> cuts{0.0};
  for (std::size_t k = 1; k < count; ++k) {
    const double even = static_cast<double>(k) / static_cast<double>(count);
    cuts.push_back(quantize(even + uniform(rng, -0.05, 0.05)));
  }
  cuts.push_back(1.0);

  std::vector<SpeedSegment> segments;
  for (std::size_t k = 0; k < count; ++k) segments.push_back({cuts[k], cuts[k + 1], speeds[k]});
  return segments;
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::RuralCurving: return "rural_curving";
    case Layout::LeftTurnUrban: return "left_turn_urban";
    case Layout::StraightUrban: return "straight_urban";
    case Layout::WideStreet: return "wide_street";
    case Layout::RightTurnRural: return "right_turn_rural";
  }
  return "unknown";
}

std::vector<Vec2> layout_keypoints(Layout layout, double length, double spacing) {
  const std::vector<Piece> pieces = pieces_for(layout, length);
  double total = 0.0;
  for (const auto& p : pieces) total += p.length;

  // Closed-form pose at arc-length s along the piece chain.
  const auto pose_at = [&](double s) {
    Vec2 pos{};
    double heading = 0.0;
    for (const auto& p : pieces) {
      const double ds = std::min(s, p.length);
      if (p.curvature == 0.0) {
        pos = pos + Vec2{std::cos(heading), std::sin(heading)} * ds;
      } else {
        const double r = 1.0 / p.curvature;
        const double next = heading + ds * p.curvature;
        pos = pos + Vec2{r * (std::sin(next) - std::sin(heading)),
                         r * (std::cos(heading) - std::cos(next))};
        heading = next;
      }
      s -= ds;
      if (s <= 0.0) break;
    }
    return pos;
  };

  std::vector<Vec2> points;
  const auto steps = static_cast<std::size_t>(std::floor(total / spacing));
  for (std::size_t i = 0; i <= steps; ++i) {
    const Vec2 p = pose_at(static_cast<double>(i) * spacing);
    points.push_back({quantize(p.x), quantize(p.y)});
  }
  if (total - static_cast<double>(steps) * spacing > 0.5 * spacing) {
    const Vec2 p = pose_at(total);
    points.push_back({quantize(p.x), quantize(p.y)});
  } else if (steps > 0) {
    const Vec2 p = pose_at(total);
    points.back() = {quantize(p.x), quantize(p.y)};
  }
  return points;
}

std::vector<ScenarioConfig> generate_suite(Difficulty difficulty, int count, std::uint64_t seed,
                                           const SuiteOptions& options) {
  if (count < 1) throw InvalidCount(fmt::format("suite size must be >= 1, got {}", count));
  if (options.speed_set.size() < 2) {
    throw ValidationError("speed set needs at least two distinct commands");
  }

  const auto& layouts = difficulty == Difficulty::Easy     ? kEasyLayouts
                        : difficulty == Difficulty::Medium ? kMediumLayouts
                                                           : kHardLayouts;
  std::vector<ScenarioConfig> suite;
  suite.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t route_seed = splitmix64(
        splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(difficulty) << 32 |
                                      static_cast<std::uint64_t>(i)));
    std::mt19937_64 rng(route_seed);

    ScenarioConfig cfg;
    cfg.route_id = fmt::format("{}_{:02d}", to_string(difficulty), i);
    cfg.difficulty = difficulty;
    cfg.seed = route_seed;
    cfg.weather = std::string(kWeathers[pick(rng, kWeathers.size())]);
    cfg.speed_segments = sample_segments(rng, options);

    double v_min = cfg.speed_segments.front().v;
    double v_max = v_min;
    for (const auto& seg : cfg.speed_segments) {
      v_min = std::min(v_min, seg.v);
      v_max = std::max(v_max, seg.v);
    }
    cfg.default_speed = v_min;

    const Layout layout = layouts[static_cast<std::size_t>(i) % layouts.size()];
    double length = uniform(rng, 600.0, 800.0);

    if (difficulty != Difficulty::Easy) {
      OvertakeSpec spec;
      // Four command sets per layout; alternate overtake/follow between sets.
      spec.behavior = (i / 4) % 2 == 0 ? Behavior::Overtake : Behavior::Follow;
      spec.lead_speed = quantize(
          uniform(rng, options.lead_speed_floor, v_min - options.lead_speed_margin));
      spec.spawn_distance = quantize(uniform(rng, 25.0, 40.0));

      // Room to finish a pass at the slowest closing speed, driven at the
      // fastest command.
      const double closing = v_min - spec.lead_speed;
      const double pass_time = (spec.spawn_distance + 10.0) / closing;
      double before_trigger = uniform(rng, 80.0, 120.0);
      if (difficulty == Difficulty::Hard) {
        const double start = uniform(rng, 70.0, 90.0);
        const double extent = (i % 2 == 0) ? 6.0 : 10.0;  // accident vs construction zone
        before_trigger = start + extent + uniform(rng, 60.0, 80.0);
        const double after = 1.3 * pass_time * v_max + 80.0;
        length = std::max(length, before_trigger + after);
        cfg.obstacles.push_back({quantize(start / length), quantize((start + extent) / length)});
      } else {
        length = std::max(length, before_trigger + 1.3 * pass_time * v_max + 80.0);
      }
      spec.trigger_progress = quantize(before_trigger / length);
      spec.timeout = std::ceil(2.0 * pass_time + 30.0);
      cfg.scenarios.push_back(spec);
    }

    cfg.waypoints = layout_keypoints(layout, length, options.keypoint_spacing);
    validate_config(cfg);
    suite.push_back(std::move(cfg));
  }
  return suite;
}

}  // namespace speedbench
