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

#include "echoforge/early_renderer.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "echoforge/delay_line.h"
#include "echoforge/sh.h"
#include "test_util.h"

namespace echoforge {
namespace {

using namespace testing;

constexpr double kFs = 44100.0;

PathEntry MakePath(int source, int tri, double delay, double pressure,
                   const Vec3& dir, int order = kDirectShOrder,
                   PathKind kind = PathKind::kEarlyReflection) {
  PathEntry p;
  p.key = PathKey{source, kind == PathKind::kDirect ? 0 : 1, true, tri, -1};
  p.kind = kind;
  p.delay = delay;
  p.pressure = FilledBands(pressure);
  p.directivity = EvalSH(dir, order);
  return p;
}

TEST(DelayLineTest, IntegerAndFractionalReads) {
  DelayLine line(2, 16);
  for (int n = 0; n < 20; ++n) {
    const double frame[2] = {static_cast<double>(n), -2.0 * n};
    line.Push(frame);
  }
  EXPECT_EQ(line.ReadInteger(0, 0), 19.0);
  EXPECT_EQ(line.ReadInteger(1, 3), -32.0);
  EXPECT_DOUBLE_EQ(line.Read(0, 2.25), 16.75);
  EXPECT_DOUBLE_EQ(line.Read(0, 1e9), 19.0 - line.max_delay());
}

TEST(SelectionTest, TruncatesToHundredAcrossSources) {
  std::vector<PathList> per_source(2);
  for (int i = 0; i < 150; ++i) {
    per_source[i % 2].push_back(MakePath(i % 2, i, 0.01 + 1e-4 * i, 0.01,
                                         Vec3::UnitX(), kEarlyShOrder));
  }
  const EarlySelection sel = SelectEarlyPaths(per_source);
  EXPECT_EQ(sel.rendered[0].size() + sel.rendered[1].size(), 100u);
  EXPECT_EQ(sel.dropped[0].size() + sel.dropped[1].size(), 50u);
  EXPECT_EQ(sel.dropped_count, 50);
}

TEST(SelectionTest, KeepsTheLoudestAndDropsInaudible) {
  std::vector<PathList> per_source(1);
  for (int i = 0; i < 120; ++i) {
    per_source[0].push_back(
        MakePath(0, i, 0.02, 1e-3 * (i + 1), Vec3::UnitY(), kEarlyShOrder));
  }
  per_source[0].push_back(MakePath(0, 500, 0.02, 1e-7, Vec3::UnitY()));
  per_source[0].push_back(
      MakePath(0, -1, 0.005, 1e-7, Vec3::UnitY(), 3, PathKind::kDirect));
  const EarlySelection sel = SelectEarlyPaths(per_source);
  EXPECT_EQ(sel.below_threshold, 1);
  ASSERT_EQ(sel.rendered[0].size(), 101u);  // the direct path is exempt
  double min_rendered = 1e9, max_dropped = 0.0;
  for (const PathEntry& p : sel.rendered[0]) {
    if (p.kind != PathKind::kDirect) {
      min_rendered = std::min(min_rendered, p.Intensity());
    }
  }
  for (const PathEntry& p : sel.dropped[0]) {
    max_dropped = std::max(max_dropped, p.Intensity());
  }
  EXPECT_EQ(sel.dropped[0].size(), 20u);
  EXPECT_GT(min_rendered, max_dropped);
}

TEST(SelectionTest, InjectedPathsLandInTheIr) {
  LowRateIR ir(100, 100.0);
  const PathEntry p = MakePath(0, 3, 0.123, 0.5, Vec3::UnitZ());
  InjectPaths(ir, std::span(&p, 1));
  for (int b = 0; b < kNumBands; ++b) {
    EXPECT_NEAR(ir.intensity(b, 12), 0.25, 1e-15);
    EXPECT_NEAR(ir.TotalIntensity(b), 0.25, 1e-15);
  }
  EXPECT_LT((*DominantDirection(ir.Directivity(0, 12)) - Vec3::UnitZ()).norm(),
            1e-12);
}

// Streams `x` (same signal in every band) through a delay line and renderer.
std::vector<std::array<double, kRenderShChannels>> Render(
    TapRenderer& tr, DelayLine& line, std::span<const double> x) {
  std::vector<std::array<double, kRenderShChannels>> out(x.size());
  for (size_t n = 0; n < x.size(); ++n) {
    const double frame[kNumBands] = {x[n], x[n], x[n], x[n]};
    line.Push(frame);
    out[n].fill(0.0);
    tr.RenderSample(line, out[n]);
  }
  return out;
}

TEST(TapRendererTest, SingleTapIsDelayedAndEncoded) {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(4000);
  for (double& v : x) v = u(gen);
  const Vec3 d = RandomUnit(gen);
  PathEntry p = MakePath(0, -1, 0.01, 1.0, d, 3, PathKind::kDirect);
  // Split the unit pressure over the bands so the band sum is the input.
  p.pressure = FilledBands(0.25);
  DelayLine line(kNumBands, 4096);
  TapRenderer tr;
  tr.SetPaths(std::span(&p, 1), kFs, 64, line.max_delay());
  const auto out = Render(tr, line, x);
  const SHVector y = EvalSH(d, 3);
  for (size_t n = 441; n < x.size(); ++n) {
    for (int c = 0; c < kRenderShChannels; ++c) {
      EXPECT_NEAR(out[n][c], x[n - 441] * y[c], 1e-12);
    }
  }
  for (size_t n = 0; n < 441; ++n) EXPECT_EQ(out[n][0], 0.0);
}

TEST(TapRendererTest, ClampsOverlongDelays) {
  DelayLine line(kNumBands, 1000);
  TapRenderer tr;
  const PathEntry p = MakePath(0, 1, 1.0, 0.1, Vec3::UnitX());
  tr.SetPaths(std::span(&p, 1), kFs, 10, line.max_delay());
  EXPECT_EQ(tr.clamped_delays(), 1);
  EXPECT_EQ(tr.active_paths(), 1);
}

TEST(TapRendererTest, RemovedPathsFadeOut) {
  DelayLine line(kNumBands, 1000);
  TapRenderer tr;
  const PathEntry p = MakePath(0, 1, 0.001, 0.1, Vec3::UnitX());
  tr.SetPaths(std::span(&p, 1), kFs, 100, line.max_delay());
  std::vector<double> ones(200, 1.0);
  Render(tr, line, ones);
  tr.SetPaths({}, kFs, 100, line.max_delay());
  const auto out = Render(tr, line, ones);
  for (size_t n = 1; n < 100; ++n) {
    EXPECT_LT(std::abs(out[n][0]), std::abs(out[n - 1][0]));
  }
  EXPECT_EQ(out[150][0], 0.0);
  EXPECT_EQ(tr.active_paths(), 0);
}

TEST(TapRendererTest, RecedingSourceIsDopplerShifted) {
  // 1 kHz source moving away at 10 m/s, updated every 441 samples.
  const double c = 343.0, v = 10.0, f = 1000.0, r0 = 5.0;
  const int block = 441;
  const int blocks = 150;
  DelayLine line(kNumBands, 8192);
  TapRenderer tr;
  std::vector<double> y;
  for (int k = 0; k < blocks; ++k) {
    const double t_end = (k + 1) * block / kFs;
    PathEntry p = MakePath(0, -1, (r0 + v * t_end) / c, 0.25, Vec3::UnitX(), 3,
                           PathKind::kDirect);
    if (k == 0) p.delay = r0 / c;
    tr.SetPaths(std::span(&p, 1), kFs, block, line.max_delay());
    std::vector<double> x(block);
    for (int n = 0; n < block; ++n) {
      x[n] = std::sin(2 * kPi * f * (k * block + n) / kFs);
    }
    for (const auto& s : Render(tr, line, x)) y.push_back(s[0]);
  }
  // Count zero crossings over the last second.
  const size_t start = y.size() - static_cast<size_t>(kFs);
  int crossings = 0;
  size_t first = 0, last = 0;
  for (size_t n = start + 1; n < y.size(); ++n) {
    if ((y[n - 1] < 0.0) != (y[n] < 0.0)) {
      if (crossings == 0) first = n;
      last = n;
      ++crossings;
    }
  }
  const double measured = 0.5 * (crossings - 1) / ((last - first) / kFs);
  EXPECT_NEAR(measured / f, 1.0 / (1.0 + v / c), 0.005 / (1.0 + v / c));
}

}  // namespace
}  // namespace echoforge
