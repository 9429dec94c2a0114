#include <benchmark/benchmark.h>

#include <random>

#include "speedbench/annotation.hpp"
#include "speedbench/episode.hpp"
#include "speedbench/expert_policy.hpp"
#include "speedbench/metrics.hpp"
#include "speedbench/suite_generator.hpp"

using namespace speedbench;

namespace {

const ScenarioConfig& medium_route() {
  static const ScenarioConfig cfg = generate_suite(Difficulty::Medium, 1, 1)[0];
  return cfg;
}

void BM_Project(benchmark::State& state) {
  const Route route = build_route(medium_route().waypoints);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> s(0.0, route.total_length());
  std::vector<Vec2> queries;
  for (int i = 0; i < 1024; ++i) queries.push_back(route.offset_point(s(rng), 1.0));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(route.project(queries[i++ & 1023]));
  state.counters["keypoints"] = static_cast<double>(route.size());
}
BENCHMARK(BM_Project);

void BM_QueryTargetSpeed(benchmark::State& state) {
  const auto& cfg = medium_route();
  const Route route = build_route(cfg.waypoints);
  const SpeedPlan plan = build_speed_plan(route, cfg.speed_segments, cfg.default_speed);
  const Vec2 p = route.point_at(0.6 * route.total_length());
  for (auto _ : state) benchmark::DoNotOptimize(plan.query(p));
}
BENCHMARK(BM_QueryTargetSpeed);

void BM_ExpertEpisode(benchmark::State& state) {
  const auto& cfg = medium_route();
  std::size_t frames = 0;
  for (auto _ : state) {
    ExpertPolicy expert;
    const auto r = run_episode(cfg, expert);
    frames += r.log.frames.size();
  }
  state.counters["frames/s"] = benchmark::Counter(static_cast<double>(frames), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ExpertEpisode)->Unit(benchmark::kMillisecond);

void BM_SpeedAdherence(benchmark::State& state) {
  const auto& cfg = medium_route();
  ExpertPolicy expert;
  const auto log = run_episode(cfg, expert).log;
  const Route route = build_route(cfg.waypoints);
  const SpeedPlan plan = build_speed_plan(route, cfg.speed_segments, cfg.default_speed);
  for (auto _ : state) benchmark::DoNotOptimize(speed_adherence(log, route, plan, {}).total);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(log.frames.size()));
}
BENCHMARK(BM_SpeedAdherence)->Unit(benchmark::kMicrosecond);

void BM_VirtualTargetSpeed(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> step(0.0, 0.3);
  std::vector<double> trace{5.0};
  for (int i = 1; i < state.range(0); ++i) trace.push_back(std::max(0.0, trace.back() + step(rng)));
  const AnnotationParams params = preset(AnnotationPreset::Long);
  for (auto _ : state) benchmark::DoNotOptimize(virtual_target_speed(trace, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_VirtualTargetSpeed)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
