#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "speedbench/annotation.hpp"
#include "speedbench/errors.hpp"

using namespace speedbench;

namespace {

std::vector<double> random_trace(gen::Rng& rng, int n) {
  std::vector<double> v{rng.uniform(0.0, 15.0)};
  for (int i = 1; i < n; ++i) {
    const double r = rng.uniform(0.0, 1.0);
    // Plateaus, smooth ramps, and jumps.
    const double next = r < 0.2 ? v.back() : r < 0.9 ? v.back() + rng.uniform(-0.4, 0.4) : rng.uniform(0.0, 15.0);
    v.push_back(std::max(0.0, next));
  }
  return v;
}

}  // namespace

TEST(Tendency, ConstantTrace) {
  const std::vector<double> v(10, 5.0);
  for (std::size_t t = 0; t < v.size(); ++t) EXPECT_EQ(tendency_speed(v, t, 40), 5.0);
}

TEST(Tendency, RisingUsesWindowMax) {
  const std::vector<double> v{2, 3, 4, 5, 4, 3};
  EXPECT_EQ(tendency_speed(v, 0, 40), 5.0);
  EXPECT_EQ(tendency_speed(v, 0, 2), 4.0);
}

TEST(Tendency, FallingUsesWindowMin) {
  const std::vector<double> v{6, 5, 4, 5, 6};
  EXPECT_EQ(tendency_speed(v, 0, 40), 4.0);
}

TEST(Tendency, LastFrameIsItself) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_EQ(tendency_speed(v, 2, 40), 3.0);
}

TEST(Tendency, MatchesScanOracle) {
  gen::Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_trace(rng, rng.integer(2, 120));
    const int F = rng.integer(1, 50);
    for (std::size_t t = 0; t < v.size(); ++t) EXPECT_EQ(tendency_speed(v, t, F), oracle::tendency(v, t, F));
  }
}

TEST(VirtualSpeed, HandEvaluatedFormula) {
  EXPECT_NEAR(oracle::virtual_speed(5.0, 5.2, 10, 1.0, 10), 7.2, 1e-12);
  EXPECT_EQ(oracle::virtual_speed(8.0, 5.0, 10, 3.0, 10), 0.0);
}

TEST(VirtualSpeed, ConstantTraceMapsToItself) {
  for (auto which : {AnnotationPreset::Long, AnnotationPreset::Short}) {
    const std::vector<double> v(30, 6.5);
    for (const auto& f : virtual_target_speed(v, preset(which))) EXPECT_EQ(f.v_virt, 6.5);
  }
}

TEST(VirtualSpeed, MatchesFormulaWithLibraryDraws) {
  gen::Rng rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = random_trace(rng, rng.integer(2, 100));
    AnnotationParams p = preset(rng.coin() ? AnnotationPreset::Long : AnnotationPreset::Short);
    p.seed = rng.engine()();
    const std::uint64_t stream = rng.engine()();
    const auto out = virtual_target_speed(v, p, stream);
    EXPECT_EQ(out[0].v_virt, oracle::tendency(v, 0, 40));
    for (std::size_t t = 1; t < v.size(); ++t) {
      const double r = extrapolation_factor(p, stream, t);
      ASSERT_GE(r, p.t_min);
      ASSERT_LE(r, p.t_max);
      const double expect = oracle::virtual_speed(oracle::tendency(v, t - 1, 40), oracle::tendency(v, t, 40), 10, r,
                                                  p.max_extend);
      EXPECT_NEAR(out[t].v_virt, expect, 1e-12);
    }
  }
}

TEST(VirtualSpeed, Invariants) {
  gen::Rng rng(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto v = random_trace(rng, rng.integer(2, 80));
    AnnotationParams p = preset(rng.coin() ? AnnotationPreset::Long : AnnotationPreset::Short);
    p.seed = static_cast<std::uint64_t>(trial);
    const auto out = virtual_target_speed(v, p);
    for (std::size_t t = 0; t < out.size(); ++t) {
      ASSERT_GE(out[t].v_virt, 0.0);
      ASSERT_LE(std::abs(out[t].v_virt - out[t].v_tend), p.max_extend);
      if (t > 0) {
        const double trend = out[t].v_tend - out[t - 1].v_tend;
        const double dv = out[t].v_virt - out[t].v_tend;
        ASSERT_GE(trend * dv, 0.0);
      }
    }
  }
}

TEST(VirtualSpeed, NoLookaheadBeyondHorizon) {
  gen::Rng rng(74);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_trace(rng, 120);
    const AnnotationParams p = preset(AnnotationPreset::Long);
    const auto base = virtual_target_speed(v, p);
    const auto t = static_cast<std::size_t>(rng.integer(0, 70));
    auto mutated = v;
    for (std::size_t j = t + 41; j < mutated.size(); ++j) mutated[j] = rng.uniform(0.0, 30.0);
    const auto after = virtual_target_speed(mutated, p);
    for (std::size_t k = 0; k <= t; ++k) ASSERT_EQ(after[k].v_virt, base[k].v_virt) << "t=" << t << " k=" << k;
  }
}

TEST(VirtualSpeed, ShortNeverExtendsMoreThanLong) {
  gen::Rng rng(75);
  for (int trial = 0; trial < 200; ++trial) {
    const auto v = random_trace(rng, rng.integer(2, 80));
    AnnotationParams lp = preset(AnnotationPreset::Long);
    AnnotationParams sp = preset(AnnotationPreset::Short);
    lp.seed = sp.seed = rng.engine()();
    const auto lo = virtual_target_speed(v, lp);
    const auto sh = virtual_target_speed(v, sp);
    for (std::size_t t = 0; t < v.size(); ++t) {
      ASSERT_LE(std::abs(sh[t].v_virt - sh[t].v_tend), std::abs(lo[t].v_virt - lo[t].v_tend) + 1e-12);
    }
  }
}

TEST(VirtualSpeed, DeterministicInSeed) {
  gen::Rng rng(76);
  const auto v = random_trace(rng, 60);
  AnnotationParams p = preset(AnnotationPreset::Long);
  p.seed = 9;
  EXPECT_EQ(annotation_csv(virtual_target_speed(v, p)), annotation_csv(virtual_target_speed(v, p)));
  AnnotationParams q = p;
  q.seed = 10;
  EXPECT_NE(annotation_csv(virtual_target_speed(v, p)), annotation_csv(virtual_target_speed(v, q)));
}

TEST(VirtualSpeed, Errors) {
  const std::vector<double> one{3.0};
  EXPECT_THROW(virtual_target_speed(one, preset(AnnotationPreset::Long)), TraceTooShort);
  AnnotationParams bad = preset(AnnotationPreset::Long);
  bad.t_min = 4.0;
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(virtual_target_speed(two, bad), ValidationError);
}

TEST(UnitDraw, RangeAndUniformity) {
  std::vector<int> bins(10, 0);
  for (std::size_t t = 0; t < 100000; ++t) {
    const double u = unit_draw(1, 2, t);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ++bins[static_cast<std::size_t>(u * 10)];
  }
  for (int b : bins) EXPECT_NEAR(b, 10000, 500);
  EXPECT_NE(unit_draw(1, 2, 3), unit_draw(1, 3, 3));
  EXPECT_NE(unit_draw(1, 2, 3), unit_draw(2, 2, 3));
}

TEST(Preset, Constants) {
  const auto l = preset(AnnotationPreset::Long);
  const auto s = preset(AnnotationPreset::Short);
  EXPECT_EQ(l.horizon, 40);
  EXPECT_EQ(l.fps, 10);
  EXPECT_EQ(l.max_extend, 10.0);
  EXPECT_EQ(l.t_max, 3.0);
  EXPECT_EQ(s.horizon, 40);
  EXPECT_EQ(s.fps, 10);
  EXPECT_EQ(s.max_extend, 3.0);
  EXPECT_EQ(s.t_max, 1.5);
  EXPECT_EQ(parse_preset("short"), AnnotationPreset::Short);
  EXPECT_THROW(parse_preset("medium"), ValidationError);
}

TEST(SpeedCsv, ParsesVColumn) {
  const auto v = parse_speed_csv("t, v ,x\r\n0,1.5,a\n1,2.25,b\n");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], 2.25);
  EXPECT_THROW(parse_speed_csv("a,b\n1,2\n"), ParseError);
  EXPECT_THROW(parse_speed_csv("v\nfast\n"), ParseError);
  EXPECT_THROW(parse_speed_csv(""), ParseError);
}

TEST(AnnotationCsv, Layout) {
  const std::vector<double> v{1.0, 2.0};
  const std::string csv = annotation_csv(virtual_target_speed(v, preset(AnnotationPreset::Short)));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "frame,v,v_tend,v_virt");
  EXPECT_NE(csv.find("0,1.000000,2.000000,2.000000"), std::string::npos);
}
