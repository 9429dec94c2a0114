// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "speedbench/annotation.hpp"
#include "speedbench/episode.hpp"
#include "speedbench/expert_policy.hpp"
#include "speedbench/metrics.hpp"
#include "speedbench/runner.hpp"
#include "speedbench/suite_generator.hpp"
#include "temp_dir.hpp"

using namespace speedbench;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean_speed_score(const std::vector<ScenarioConfig>& suite, const std::function<std::unique_ptr<Policy>()>& make) {
  double sum = 0.0;
  for (const auto& cfg : suite) {
    auto policy = make();
    const auto r = run_episode(cfg, *policy);
    sum += score_episode(r.log, cfg, {}).speed_adherence;
  }
  return sum / static_cast<double>(suite.size());
}

Verdict metric_oracle() {
  const auto t0 = Clock::now();
  gen::Rng rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = gen::polyline(rng, rng.integer(2, 40), 1.0, 8.0);
    const Route route = build_route(pts);
    const SpeedPlan plan = build_speed_plan(route, gen::segments(rng), rng.uniform(0.0, 12.0));
    const std::vector<double> speeds(plan.speeds().begin(), plan.speeds().end());
    const auto log = gen::route_log(rng, route, rng.integer(2, 300));
    const MetricConfig cfg;
    const double got = speed_adherence(log, route, plan, cfg).total;
    const double want = oracle::speed_adherence(log, pts, speeds, cfg.alpha, cfg.epsilon);
    worst = std::max(worst, std::abs(got - want));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && elapsed < 5.0, fmt::format("max |diff| {:.3g} over 200 logs in {:.2f} s", worst, elapsed)};
}

Verdict perfect_and_inert() {
  const auto cfg = generate_suite(Difficulty::Easy, 1, 5)[0];
  const Route route = build_route(cfg.waypoints);
  const SpeedPlan plan = build_speed_plan(route, cfg.speed_segments, cfg.default_speed);
  TrajectoryLog perfect;
  for (int i = 0; i * 0.8 <= route.total_length(); ++i) {
    LogFrame f;
    f.frame = i;
    f.t = i * kDt;
    f.pos = route.point_at(i * 0.8);
    f.speed = plan.speed_at(route.project(f.pos));
    perfect.frames.push_back(f);
  }
  const double p = speed_adherence(perfect, route, plan, {}).total;
  InertPolicy inert;
  const double z = speed_adherence(run_episode(cfg, inert).log, route, plan, {}).total;
  return {p == 100.0 && z == 0.0, fmt::format("perfect {:.17g}, inert {:.17g}", p, z)};
}

Verdict speed_following() {
  const auto t0 = Clock::now();
  const auto easy = generate_suite(Difficulty::Easy, 16, 1);
  const double expert = mean_speed_score(easy, [] { return std::make_unique<ExpertPolicy>(); });
  const double fixed = mean_speed_score(easy, [] { return std::make_unique<FixedSpeedPolicy>(8.0); });
  bool mixed = true;
  for (const auto& c : easy) {
    double lo = 1e9, hi = -1e9;
    for (const auto& s : c.speed_segments) lo = std::min(lo, s.v), hi = std::max(hi, s.v);
    mixed &= hi > lo;
  }
  const double elapsed = seconds_since(t0);
  return {expert >= 95.0 && fixed <= 70.0 && mixed && elapsed < 30.0,
          fmt::format("expert {:.2f} (>= 95), fixed 8 m/s {:.2f} (<= 70), {:.2f} s", expert, fixed, elapsed)};
}

Verdict overtake_protocol() {
  const auto medium = generate_suite(Difficulty::Medium, 16, 1);
  auto forced = [&](Behavior b) {
    auto suite = medium;
    for (auto& c : suite) c.scenarios[0].behavior = b;
    return suite;
  };
  auto score_with = [](const std::vector<ScenarioConfig>& suite, auto make, bool* passed_any = nullptr) {
    double sum = 0.0;
    for (const auto& cfg : suite) {
      auto policy = make();
      const auto r = run_episode(cfg, *policy);
      sum += score_episode(r.log, cfg, {}).overtake.value_or(-1.0);
      if (passed_any) {
        for (const auto& o : r.outcomes) *passed_any |= o.ego_ever_passed;
      }
    }
    return sum / static_cast<double>(suite.size());
  };
  const auto expert = [] { return std::make_unique<ExpertPolicy>(); };
  const double overtake = score_with(forced(Behavior::Overtake), expert);
  bool passed = false;
  const double follow = score_with(forced(Behavior::Follow), expert, &passed);
  const double keeper = score_with(forced(Behavior::Overtake), [] { return std::make_unique<LaneKeepingPolicy>(); });

  // Trigger at the very end of the route with a short time limit: the
  // scenario never activates.
  auto untriggered = forced(Behavior::Overtake);
  double injected = 0.0;
  for (auto& cfg : untriggered) {
    cfg.scenarios[0].trigger_progress = 1.0;
    cfg.scenarios[0].timeout = 1.0;
    ExpertPolicy p;
    EpisodeOptions opt;
    opt.time_limit = 20.0;
    const auto r = run_episode(cfg, p, opt);
    injected += score_episode(r.log, cfg, {}).overtake.value_or(-1.0);
  }
  injected /= static_cast<double>(untriggered.size());

  return {overtake == 100.0 && follow == 100.0 && !passed && keeper == 0.0 && injected == 0.0,
          fmt::format("overtake {:.1f}, follow {:.1f} (passed: {}), lane keeping {:.1f}, untriggered {:.1f}", overtake,
                      follow, passed ? "yes" : "no", keeper, injected)};
}

Verdict annotation_invariants() {
  gen::Rng rng(77);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(2, 150);
    std::vector<double> v{rng.uniform(0, 15)};
    for (int i = 1; i < n; ++i) v.push_back(std::max(0.0, v.back() + rng.uniform(-1.0, 1.0) * (rng.coin(0.2) ? 0 : 1)));
    AnnotationParams p = preset(rng.coin() ? AnnotationPreset::Long : AnnotationPreset::Short);
    p.seed = rng.engine()();
    const auto out = virtual_target_speed(v, p);
    for (const auto& f : out) {
      violations += f.v_virt < 0.0;
      violations += std::abs(f.v_virt - f.v_tend) > p.max_extend;
    }
    const std::vector<double> flat(static_cast<std::size_t>(n), v[0]);
    for (const auto& f : virtual_target_speed(flat, p)) violations += f.v_virt != v[0];
    // Changing speeds beyond t + F leaves frame t alone.
    const auto t = static_cast<std::size_t>(rng.integer(0, n - 1));
    auto mutated = v;
    for (std::size_t j = t + static_cast<std::size_t>(p.horizon) + 1; j < mutated.size(); ++j) mutated[j] += 7.0;
    violations += virtual_target_speed(mutated, p)[t].v_virt != out[t].v_virt;
  }
  const auto l = preset(AnnotationPreset::Long);
  const auto s = preset(AnnotationPreset::Short);
  const bool presets = l.horizon == 40 && l.fps == 10 && l.max_extend == 10.0 && l.t_max == 3.0 &&
                       s.horizon == 40 && s.fps == 10 && s.max_extend == 3.0 && s.t_max == 1.5;
  return {violations == 0 && presets,
          fmt::format("{} violations over 1000 traces, presets {}", violations, presets ? "exact" : "wrong")};
}

Verdict determinism() {
  TempDir a("acc_a");
  TempDir b("acc_b");
  std::string first_csv;
  bool same = true;
  for (const TempDir* dir : {&a, &b}) {
    cmd_generate({std::nullopt, 16, 7, dir->path() / "suite"});
    cmd_run({dir->path() / "suite", "expert", dir->path() / "logs", 1, 7});
    cmd_score({dir->path() / "logs", dir->path() / "suite", {}, std::nullopt, dir->path() / "rollup.csv"});
  }
  std::size_t logs = 0;
  for (const auto& entry : fs::directory_iterator(a.path() / "logs")) {
    if (entry.path().extension() != ".jsonl") continue;
    ++logs;
    same &= read_file(entry.path()) == read_file(b.path() / "logs" / entry.path().filename());
  }
  same &= read_file(a / "rollup.csv") == read_file(b / "rollup.csv");
  return {same && logs == 48, fmt::format("{} logs and rollup CSV {}", logs, same ? "byte-identical" : "differ")};
}

Verdict softening_and_weighting() {
  gen::Rng rng(99);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Route route = build_route(gen::polyline(rng, rng.integer(2, 20), 1.0, 8.0));
    const SpeedPlan plan = build_speed_plan(route, gen::segments(rng), rng.uniform(1.0, 12.0));
    const auto log = gen::route_log(rng, route, rng.integer(3, 100));

    TrajectoryLog padded = log;
    const auto at = static_cast<std::size_t>(rng.integer(0, static_cast<int>(log.frames.size()) - 1));
    padded.frames.insert(padded.frames.begin() + static_cast<std::ptrdiff_t>(at) + 1, log.frames[at]);
    const double base = speed_adherence(log, route, plan, {}).total;
    bad += std::abs(base - speed_adherence(padded, route, plan, {}).total) > 1e-9;

    MetricConfig lo{.softening = Softening::Off};
    MetricConfig hi = lo;
    hi.alpha = 4.5;
    const auto breakdown = speed_adherence(log, route, plan, lo);
    bool imperfect = false;
    for (const auto& f : breakdown.frames) imperfect |= f.w > 0.0 && f.e > 0.0;
    if (imperfect) bad += !(speed_adherence(log, route, plan, hi).total < breakdown.total);

    bad += speed_adherence(log, route, plan, {.softening = Softening::Full}).total < breakdown.total;
  }
  return {bad == 0, fmt::format("{} violations over 100 paired trials", bad)};
}

Verdict suite_runtime(Clock::time_point started) {
  const auto t0 = Clock::now();
  const std::string cmd = std::string(SPEEDBENCH_UNIT_TESTS) + " --gtest_brief=1 > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double unit = seconds_since(t0);
  const double total = seconds_since(started);
  return {status == 0 && total < 60.0,
          fmt::format("unit tests {} in {:.1f} s; with acceptance {:.1f} s (< 60)", status == 0 ? "passed" : "FAILED",
                      unit, total)};
}

}  // namespace

int main() {
  const auto started = Clock::now();
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {"AC1 metric oracle equivalence", metric_oracle},
      {"AC2 perfect tracking and inert", perfect_and_inert},
      {"AC3 expert speed following", speed_following},
      {"AC4 overtake protocol", overtake_protocol},
      {"AC5 annotation invariants", annotation_invariants},
      {"AC6 determinism", determinism},
      {"AC7 softening and weighting", softening_and_weighting},
      {"AC8 full suite runtime", [&] { return suite_runtime(started); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v{false, {}};
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << fmt::format("{} {}: {}", v.pass ? "PASS" : "FAIL", c.name, v.detail) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
