#include "speedbench/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "speedbench/errors.hpp"

namespace speedbench {

void validate(const MetricConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) {
    throw ValidationError(fmt::format("alpha must be > 0, got {}", cfg.alpha));
  }
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ValidationError(fmt::format("epsilon must be > 0, got {}", cfg.epsilon));
  }
}

SpeedAdherenceBreakdown speed_adherence(const TrajectoryLog& log, const Route& route,
                                        const SpeedPlan& plan, const MetricConfig& cfg) {
  validate(cfg);
  if (log.frames.size() < 2) {
    throw EmptyLog(fmt::format("log '{}' has {} frame(s); need at least 2", log.meta.route_id,
                               log.frames.size()));
  }
  SpeedAdherenceBreakdown out;
  out.frames.reserve(log.frames.size());
  double weighted = 0.0;
  double weight = 0.0;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const LogFrame& f = log.frames[i];
    FrameScore fs;
    fs.s = route.project(f.pos);
    fs.w = i == 0 ? 0.0 : distance(log.frames[i - 1].pos, f.pos);
    fs.v_actual = f.speed;
    fs.v_target = plan.speed_at(fs.s);
    fs.e = std::abs(fs.v_actual - fs.v_target) / std::max(fs.v_target, cfg.epsilon);
    fs.score = std::exp(-cfg.alpha * fs.e);
    fs.softened = cfg.softening != Softening::Off && f.behavior == Behavior::Follow && f.lead &&
                  f.lead->speed <= fs.v_actual && fs.v_actual < fs.v_target;
    if (fs.softened) {
      fs.score = cfg.softening == Softening::Full ? 1.0 : std::exp(-0.5 * cfg.alpha * fs.e);
    }
    weighted += fs.w * fs.score;
    weight += fs.w;
    out.frames.push_back(fs);
  }
  out.total = weight > 0.0 ? 100.0 * weighted / weight : 0.0;
  return out;
}

bool scenario_succeeded(const ScenarioOutcome& o) {
  if (!o.triggered) return false;
  switch (o.commanded) {
    case Behavior::Overtake: return o.ego_finished_ahead;
    case Behavior::Follow: return !o.ego_ever_passed && !o.collision;
    case Behavior::None: return false;
  }
  return false;
}

std::optional<double> overtake_score(std::span<const ScenarioOutcome> outcomes) {
  if (outcomes.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& o : outcomes) sum += scenario_succeeded(o) ? 100.0 : 0.0;
  return sum / static_cast<double>(outcomes.size());
}

constexpr double kCompletionSnap = 1e-4;  // m

AuxiliaryScores auxiliary_scores(const TrajectoryLog& log, const Route& route, const SpeedPlan& plan,
                                 int collisions, const MetricConfig& cfg) {
  AuxiliaryScores out;
  const double length = route.total_length();
  double furthest = 0.0;
  double actual = 0.0;
  double target = 0.0;
  int comfortable = 0;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    const LogFrame& f = log.frames[i];
    const double s = route.project(f.pos);
    furthest = std::max(furthest, s);
    if (i > 0) {
      const double w = distance(log.frames[i - 1].pos, f.pos);
      actual += w * f.speed;
      target += w * plan.speed_at(s);
    }
    const double jerk = i == 0 ? 0.0 : (f.accel - log.frames[i - 1].accel) * kFps;
    if (std::abs(f.accel) <= cfg.comfort.a_max && std::abs(jerk) <= cfg.comfort.j_max) ++comfortable;
  }
  // Logged positions carry ~1e-6 m of rounding; reaching within a tenth of a
  // millimetre of the end counts as finishing.
  out.route_completion = furthest >= length - kCompletionSnap ? 100.0 : 100.0 * furthest / length;
  out.safety_penalty = std::pow(0.6, std::max(0, collisions));
  out.driving_score = out.route_completion * out.safety_penalty;
  out.efficiency = target > 0.0 ? 100.0 * actual / target : 0.0;
  out.comfort = log.frames.empty()
                    ? 0.0
                    : 100.0 * comfortable / static_cast<double>(log.frames.size());
  return out;
}

ScoreReport score_episode(const TrajectoryLog& log, const ScenarioConfig& cfg, const MetricConfig& metric) {
  const Route route = Route::build(cfg.waypoints);
  const SpeedPlan plan = SpeedPlan::build(route, cfg.speed_segments, cfg.default_speed);
  ScoreReport r;
  r.speed_adherence = speed_adherence(log, route, plan, metric).total;
  // Untriggered scenarios are missing from truncated logs; pad them as
  // failures so they still count.
  std::vector<ScenarioOutcome> outcomes = log.meta.outcomes;
  for (std::size_t i = outcomes.size(); i < cfg.scenarios.size(); ++i) {
    outcomes.push_back({.triggered = false, .commanded = cfg.scenarios[i].behavior});
  }
  r.overtake = overtake_score(outcomes);
  const AuxiliaryScores aux = auxiliary_scores(log, route, plan, log.meta.collisions, metric);
  r.route_completion = aux.route_completion;
  r.safety_penalty = aux.safety_penalty;
  r.driving_score = aux.driving_score;
  r.efficiency = aux.efficiency;
  r.comfort = aux.comfort;
  r.collisions = log.meta.collisions;
  r.success = r.route_completion >= 100.0 && r.collisions == 0;
  return r;
}

namespace {

struct Accumulator {
  int count = 0;
  int overtake_count = 0;
  double speed = 0, overtake = 0, ds = 0, sr = 0, rc = 0, eff = 0, comfort = 0;

  void add(const ScoreReport& r) {
    ++count;
    speed += r.speed_adherence;
    if (r.overtake) {
      ++overtake_count;
      overtake += *r.overtake;
    }
    ds += r.driving_score;
    sr += r.success ? 100.0 : 0.0;
    rc += r.route_completion;
    eff += r.efficiency;
    comfort += r.comfort;
  }

  BucketSummary summary() const {
    BucketSummary b;
    b.count = count;
    if (count == 0) return b;
    const double n = count;
    b.speed_adherence = speed / n;
    if (overtake_count > 0) b.overtake = overtake / overtake_count;
    b.driving_score = ds / n;
    b.success_rate = sr / n;
    b.route_completion = rc / n;
    b.efficiency = eff / n;
    b.comfort = comfort / n;
    return b;
  }
};

}  // namespace

Rollup aggregate(std::span<const std::pair<Difficulty, ScoreReport>> reports) {
  Accumulator all, easy, medium, hard;
  for (const auto& [difficulty, report] : reports) {
    all.add(report);
    switch (difficulty) {
      case Difficulty::Easy: easy.add(report); break;
      case Difficulty::Medium: medium.add(report); break;
      case Difficulty::Hard: hard.add(report); break;
    }
  }
  return {all.summary(), easy.summary(), medium.summary(), hard.summary()};
}

std::string rollup_csv(const Rollup& rollup, const std::string& label) {
  const BucketSummary* buckets[] = {&rollup.all, &rollup.easy, &rollup.medium, &rollup.hard};
  const char* suffix[] = {"A", "E", "M", "H"};
  struct Column {
    const char* name;
    std::optional<double> (*get)(const BucketSummary&);
  };
  const Column columns[] = {
      {"speed_adherence", [](const BucketSummary& b) -> std::optional<double> { return b.speed_adherence; }},
      {"overtake", [](const BucketSummary& b) { return b.overtake; }},
      {"driving_score", [](const BucketSummary& b) -> std::optional<double> { return b.driving_score; }},
      {"success_rate", [](const BucketSummary& b) -> std::optional<double> { return b.success_rate; }},
      {"route_completion", [](const BucketSummary& b) -> std::optional<double> { return b.route_completion; }},
      {"efficiency", [](const BucketSummary& b) -> std::optional<double> { return b.efficiency; }},
      {"comfort", [](const BucketSummary& b) -> std::optional<double> { return b.comfort; }},
  };

  std::string header = "policy";
  std::string row = label;
  for (const auto& col : columns) {
    for (int k = 0; k < 4; ++k) {
      header += fmt::format(",{}_{}", col.name, suffix[k]);
      const auto value = buckets[k]->count > 0 ? col.get(*buckets[k]) : std::nullopt;
      row += value ? fmt::format(",{:.4f}", *value) : std::string(",N/A");
    }
  }
  return header + "\n" + row + "\n";
}

}  // namespace speedbench
