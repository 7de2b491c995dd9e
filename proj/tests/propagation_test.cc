// Copyright 2026 The EchoForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "echoforge/propagation.h"

#include <cmath>

#include <gtest/gtest.h>

#include "echoforge/ir_analysis.h"
#include "echoforge/ray_tracer.h"
#include "echoforge/rng.h"
#include "echoforge/sh.h"
#include "test_util.h"

namespace echoforge {
namespace {

using testing::MakeFreeField;
using testing::MakeShoebox;

PropagationConfig Config(int rays, int order = 200) {
  PropagationConfig c;
  c.tracer.primary_rays = rays;
  c.tracer.max_order = order;
  return c;
}

FrameTrace Trace(const SceneModel& scene, const PropagationConfig& c,
                 uint64_t seed) {
  const Vec3 pos[] = {scene.sources()[0].position};
  return TraceFrame(scene, scene.listener().position, pos, c, Rng(seed));
}

TEST(DirectSoundTest, PointSourceFollowsInverseSquareLaw) {
  const double power = 3.0;
  // Source gain is the intensity at 1 m, i.e. power / (4 pi).
  const SceneModel scene = MakeFreeField(Vec3(2, 0, 0), Vec3::Zero(),
                                         power / (4.0 * kPi));
  Rng rng(1);
  const PathEntry e = ComputeDirectSound(scene, Vec3(2, 0, 0), 0.0,
                                         scene.sources()[0].gain, 0,
                                         Vec3::Zero(), rng, 16);
  for (int b = 0; b < kNumBands; ++b) {
    EXPECT_NEAR(e.pressure[b] * e.pressure[b], power / (4.0 * kPi * 4.0),
                1e-12);
  }
  EXPECT_NEAR(e.delay, 2.0 / 343.0, 1e-12);
  EXPECT_EQ(e.kind, PathKind::kDirect);
  EXPECT_EQ(e.directivity.order(), kDirectShOrder);
  const auto dir = DominantDirection(e.directivity);
  ASSERT_TRUE(dir.has_value());
  EXPECT_LT((*dir - Vec3::UnitX()).norm(), 1e-3);
}

TEST(DirectSoundTest, OccludedSourceIsSilent) {
  Material m{"m", FilledBands(0.5), FilledBands(0.5)};
  std::vector<Triangle> wall = {
      {Vec3(1, -5, -5), Vec3(1, 5, -5), Vec3(1, 5, 5), 0},
      {Vec3(1, -5, -5), Vec3(1, 5, 5), Vec3(1, -5, 5), 0}};
  Source s;
  s.position = Vec3(2, 0, 0);
  const SceneModel scene(wall, {m}, {s}, Listener{});
  Rng rng(1);
  const PathEntry e =
      ComputeDirectSound(scene, s.position, 0.0, 1.0, 0, Vec3::Zero(), rng, 8);
  EXPECT_EQ(e.Intensity(), 0.0);
}

TEST(DirectSoundTest, SphericalSourceDirectionInsideItsDisc) {
  const SceneModel scene =
      MakeFreeField(Vec3(0, 2, 0), Vec3::Zero(), 1.0, 1.0);
  Rng rng(2);
  const PathEntry e = ComputeDirectSound(scene, Vec3(0, 2, 0), 1.0, 1.0, 0,
                                         Vec3::Zero(), rng, 512);
  EXPECT_GT(e.directivity[0], 0.0);
  const auto dir = DominantDirection(e.directivity);
  ASSERT_TRUE(dir.has_value());
  // Angular radius asin(1/2) = 30 degrees.
  EXPECT_LT(std::acos(std::clamp(dir->dot(Vec3::UnitY()), -1.0, 1.0)),
            kPi / 6.0);
}

TEST(PropagationTest, FreeFieldHasOnlyDirectSound) {
  const SceneModel scene = MakeFreeField(Vec3(0, 0, 3), Vec3::Zero());
  const FrameTrace f = Trace(scene, Config(50), 3);
  EXPECT_TRUE(f.stats.open_field);
  EXPECT_TRUE(f.sources[0].ir.IsSilent());
  EXPECT_TRUE(f.sources[0].early.empty());
  EXPECT_NEAR(f.sources[0].direct.Intensity(), 4.0 / 9.0, 1e-12);
}

TEST(PropagationTest, ShoeboxMeanFreePathMatchesFourVOverS) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  const FrameTrace f = Trace(scene, Config(500), 4);
  EXPECT_GE(f.stats.total_segments, 100000);
  EXPECT_EQ(f.stats.total_segments, 500 * 200);
  const double expected = 4.0 * 1000.0 / 600.0;
  EXPECT_NEAR(f.stats.mean_free_path, expected, 0.03 * expected);
}

TEST(PropagationTest, ShoeboxRt60NearEyring) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  const FrameTrace f = Trace(scene, Config(500), 5);
  const double eyring = -0.161 * 1000.0 / (600.0 * std::log(1.0 - 0.2));
  for (int b = 0; b < kNumBands; ++b) {
    const auto rt = EstimateRt60(f.sources[0].ir.band(b), 100.0);
    ASSERT_TRUE(rt.has_value());
    EXPECT_NEAR(*rt, eyring, 0.15 * eyring);
  }
}

TEST(PropagationTest, EarlyPathsStayLowOrder) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  const FrameTrace f = Trace(scene, Config(50), 6);
  ASSERT_FALSE(f.sources[0].early.empty());
  for (const auto& [key, acc] : f.sources[0].early) {
    EXPECT_GE(key.order, 1);
    EXPECT_LE(key.order, 2);
  }
  // Late bins start after the shortest third-order path could arrive.
  const LowRateIR& ir = f.sources[0].ir;
  const double direct = (Vec3(6.5, 6, 5) - Vec3(3, 3.5, 4)).norm();
  for (int k = 0; k < static_cast<int>(std::floor(direct / 343.0 * 100.0));
       ++k) {
    EXPECT_EQ(ir.intensity(0, k), 0.0);
  }
}

TEST(PropagationTest, DirectivityInvariantsHold) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  const FrameTrace f = Trace(scene, Config(100), 7);
  const LowRateIR& ir = f.sources[0].ir;
  for (int b = 0; b < kNumBands; ++b) {
    for (int k = 0; k < ir.length(); ++k) {
      const double i = ir.intensity(b, k);
      const Eigen::Vector4d& w = ir.weighted_directivity(b, k);
      ASSERT_GE(i, 0.0);
      if (i == 0.0) {
        ASSERT_TRUE(w.isZero(0.0));
        continue;
      }
      for (int c = 1; c < 4; ++c) {
        ASSERT_GE(w[0] + 1e-15, std::abs(w[c]) / std::sqrt(3.0));
      }
    }
  }
}

TEST(PropagationTest, DeterministicAcrossRunsAndThreadCounts) {
  const SceneModel scene = MakeShoebox(0.3, 0.4);
  PropagationConfig one = Config(64);
  one.tracer.threads = 1;
  PropagationConfig four = one;
  four.tracer.threads = 4;
  const FrameTrace a = Trace(scene, one, 8);
  const FrameTrace b = Trace(scene, four, 8);
  const FrameTrace c = Trace(scene, one, 9);
  EXPECT_EQ(a.sources[0].ir.band(2), b.sources[0].ir.band(2));
  EXPECT_EQ(a.stats.mean_free_path, b.stats.mean_free_path);
  ASSERT_EQ(a.sources[0].early.size(), b.sources[0].early.size());
  EXPECT_NE(a.sources[0].ir.band(2), c.sources[0].ir.band(2));
}

TEST(PropagationTest, TotalIntensityBelowClosedRoomBound) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  const FrameTrace f = Trace(scene, Config(200), 10);
  // Nearest wall to the source is 3 m away; sum (1 - a)^k over k >= 1.
  const double bound = 1.0 / 9.0 * (1.0 - 0.2) / 0.2;
  for (int b = 0; b < kNumBands; ++b) {
    EXPECT_LT(f.sources[0].ir.TotalIntensity(b), bound);
  }
}

TEST(PropagationTest, VarianceHalvesWhenRaysDouble) {
  const SceneModel scene = MakeShoebox(0.2, 0.5);
  auto variance = [&](int rays) {
    const int seeds = 40;
    std::vector<std::vector<double>> runs;
    for (int s = 0; s < seeds; ++s) {
      runs.push_back(Trace(scene, Config(rays, 100), 1000 + s)
                         .sources[0]
                         .ir.band(0));
    }
    double total = 0.0;
    for (int k = 5; k < 60; ++k) {
      double mean = 0.0, sq = 0.0;
      for (const auto& r : runs) mean += r[k];
      mean /= seeds;
      for (const auto& r : runs) sq += (r[k] - mean) * (r[k] - mean);
      total += sq / (seeds - 1);
    }
    return total;
  };
  const double ratio = variance(25) / variance(50);
  EXPECT_GT(ratio, 2.0 * 0.7);
  EXPECT_LT(ratio, 2.0 * 1.3);
}

TEST(ImageSourceTest, FirstOrderPathsMatchMirrorGeometry) {
  const double alpha = 0.2, scatter = 0.5;
  const SceneModel scene = MakeShoebox(alpha, scatter);
  const Vec3 src(3, 3.5, 4), lis(6.5, 6, 5);
  const TracerConfig tc;
  int valid = 0;
  for (int t = 0; t < static_cast<int>(scene.triangles().size()); ++t) {
    PathKey key{0, 1, true, t, -1};
    const auto path = ValidateSpecularPath(scene, lis, src, 1.0, key, tc);
    if (!path) continue;
    ++valid;
    // Independent mirror image across the wall plane.
    const Triangle& tri = scene.triangles()[t];
    const Vec3 n = (tri.v1 - tri.v0).cross(tri.v2 - tri.v0).normalized();
    const Vec3 image = src - 2.0 * (src - tri.v0).dot(n) * n;
    const double len = (lis - image).norm();
    EXPECT_NEAR(path->length, len, 1e-9);
    EXPECT_NEAR(path->energy[0],
                (1.0 - alpha) * (1.0 - scatter) / (len * len), 1e-12);
    EXPECT_LT((path->direction - (image - lis).normalized()).norm(), 1e-9);
  }
  EXPECT_EQ(valid, 6);  // one per wall of the cube
}

TEST(CoherenceTest, SmoothingFactorClosedForm) {
  EXPECT_NEAR(SmoothingAlpha(1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(SmoothingAlpha(1e-9, 0.1), 1.0, 1e-12);
}

TEST(CoherenceTest, AccumulateConvergesGeometrically) {
  LowRateIR frame(10, 100.0);
  frame.Add(0.03, FilledBands(2.0), Vec3::UnitX());
  LowRateIR cache(10, 100.0);
  cache.Add(0.05, FilledBands(1.0), Vec3::UnitY());
  const double tau = 3.0, dt = 0.1;
  const LowRateIR once = AccumulateIr(cache, frame, tau, dt);
  const double a = 1.0 - std::exp(-dt / tau);
  EXPECT_NEAR(once.intensity(0, 3), 2.0 * a, 1e-15);
  EXPECT_NEAR(once.intensity(0, 5), 1.0 - a, 1e-15);
  LowRateIR acc = cache;
  for (int i = 0; i < static_cast<int>(std::ceil(5.0 * tau / dt)); ++i) {
    acc = AccumulateIr(acc, frame, tau, dt);
  }
  EXPECT_LT(std::abs(acc.intensity(1, 3) - 2.0) / 2.0, 0.01);
  EXPECT_LT(acc.intensity(1, 5), 0.01);
  const LowRateIR instant = AccumulateIr(cache, frame, 1e-12, dt);
  EXPECT_EQ(instant.band(2), frame.band(2));
}

TEST(CoherenceTest, AccumulateZeroExtendsShorterIr) {
  LowRateIR shorter(5, 100.0), longer(10, 100.0);
  longer.Add(0.08, FilledBands(1.0), Vec3::UnitZ());
  const LowRateIR out = AccumulateIr(shorter, longer, 1.0, 1.0);
  EXPECT_EQ(out.length(), 10);
  EXPECT_NEAR(out.intensity(0, 8), 1.0 - std::exp(-1.0), 1e-15);
}

TEST(CoherenceTest, LowRateIrIsFourHundredFortyOneTimesSmaller) {
  const LowRateIR low(static_cast<int>(std::ceil(8.0 * 100.0)), 100.0);
  const LowRateIR full(static_cast<int>(std::ceil(8.0 * 44100.0)), 44100.0);
  EXPECT_EQ(full.length(), 441 * low.length());
}

TEST(CoherenceTest, EarlyCacheExpiresStaleEntries) {
  CoherenceCaches caches(1.0, 3.0);
  EarlyPathMap first;
  PathKey key{0, 1, true, 3, -1};
  first[key].Add(0.02, FilledBands(1.0), Vec3::UnitX());
  const LowRateIR empty(10, 100.0);
  caches.Update(first, empty, 0.1);
  ASSERT_EQ(caches.EarlyPaths().size(), 1u);
  EXPECT_NEAR(caches.EarlyPaths()[0].Intensity(), 4.0, 1e-12);
  for (int i = 0; i < 25; ++i) caches.Update({}, empty, 0.1);
  EXPECT_TRUE(caches.EarlyPaths().empty());
}

}  // namespace
}  // namespace echoforge
