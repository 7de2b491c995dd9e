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

#include "echoforge/ir_analysis.h"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "echoforge/rng.h"
#include "echoforge/sh.h"

namespace echoforge {
namespace {

std::vector<double> ExponentialIr(double rt60, double rate, double seconds,
                                  double scale = 1.0) {
  std::vector<double> ir(static_cast<size_t>(seconds * rate));
  for (size_t k = 0; k < ir.size(); ++k) {
    ir[k] = scale * std::pow(10.0, -6.0 * (k / rate) / rt60);
  }
  return ir;
}

bool IsPrime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

TEST(Rt60Test, RecoversExponentialDecays) {
  for (double rt : {0.3, 0.5, 1.0, 1.5, 2.5, 4.0}) {
    const auto ir = ExponentialIr(rt, 100.0, 8.0);
    const auto est = EstimateRt60(ir, 100.0);
    ASSERT_TRUE(est.has_value());
    EXPECT_NEAR(*est, rt, 0.02 * rt) << rt;
  }
}

TEST(Rt60Test, ToleratesMultiplicativeNoise) {
  std::mt19937_64 gen(31);
  // 20 dB SNR: noise power is 1% of the signal power.
  std::normal_distribution<double> noise(0.0, 0.1);
  for (double rt : {0.3, 1.0, 2.0, 4.0}) {
    auto ir = ExponentialIr(rt, 100.0, 8.0);
    for (double& v : ir) v *= std::max(0.0, 1.0 + noise(gen));
    const auto est = EstimateRt60(ir, 100.0);
    ASSERT_TRUE(est.has_value());
    EXPECT_NEAR(*est, rt, 0.05 * rt) << rt;
  }
}

TEST(Rt60Test, SilentAndDegenerateInputs) {
  EXPECT_FALSE(EstimateRt60(std::vector<double>(800, 0.0), 100.0));
  std::vector<double> two(800, 0.0);
  two[3] = 1.0;
  two[9] = 0.5;
  EXPECT_FALSE(EstimateRt60(two, 100.0));
}

TEST(Rt60Test, TwoSlopeDecayLiesBetweenSlopes) {
  std::vector<double> ir(800);
  const double knee = 0.3;
  for (size_t k = 0; k < ir.size(); ++k) {
    const double t = k / 100.0;
    const double db = t < knee ? -60.0 * t / 1.0
                               : -60.0 * knee / 1.0 - 60.0 * (t - knee) / 3.0;
    ir[k] = std::pow(10.0, db / 10.0);
  }
  const auto est = EstimateRt60(ir, 100.0);
  ASSERT_TRUE(est.has_value());
  EXPECT_GE(*est, 1.0);
  EXPECT_LE(*est, 3.0);
}

TEST(Rt60Test, ScaleInvariantAndClamped) {
  const auto a = EstimateRt60(ExponentialIr(1.2, 100.0, 8.0), 100.0);
  const auto b = EstimateRt60(ExponentialIr(1.2, 100.0, 8.0, 1e-7), 100.0);
  EXPECT_NEAR(*a, *b, 1e-9);
  const auto slow = EstimateRt60(ExponentialIr(30.0, 100.0, 8.0), 100.0, 8.0);
  EXPECT_DOUBLE_EQ(*slow, 8.0);
}

TEST(SmoothingTest, Examples) {
  EXPECT_NEAR(SmoothParameter(3.0, 1.0, 1e-9, 1.0), 3.0, 1e-12);
  // alpha = 0.5 when dt = tau ln 2.
  EXPECT_NEAR(SmoothParameter(2.0, 1.0, 1.0, std::log(2.0)), 1.5, 1e-12);
  double v = 0.0;
  for (int i = 0; i < 5; ++i) v = SmoothParameter(1.0, v, 1.0, 1.0);
  EXPECT_LT(std::abs(v - 1.0), 0.01);
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(gen), b = u(gen);
    const double s = SmoothParameter(a, b, 0.5 + std::abs(u(gen)), 0.1);
    EXPECT_GE(s, std::min(a, b) - 1e-12);
    EXPECT_LE(s, std::max(a, b) + 1e-12);
  }
}

TEST(ReverbGainTest, EnergyIntegralMatchesNumericIntegration) {
  // Trapezoid integration of 10^(-6t/T) over [0, 20T] with fine steps.
  for (double rt : {0.5, 1.0, 2.0}) {
    const int n = 2000000;
    const double h = 20.0 * rt / n;
    double sum = 0.5 * (1.0 + std::pow(10.0, -120.0));
    for (int i = 1; i < n; ++i) sum += std::pow(10.0, -6.0 * i * h / rt);
    const double numeric = sum * h;
    EXPECT_NEAR(ReverbEnergyIntegral(rt) / numeric, 1.0, 1e-6);
  }
  EXPECT_NEAR(ReverbEnergyIntegral(1.0), 0.072382, 1e-6);
}

TEST(ReverbGainTest, Examples) {
  EXPECT_NEAR(ReverbGain(ReverbEnergyIntegral(1.3), 1.3), 1.0, 1e-12);
  EXPECT_NEAR(ReverbGain(4.0 * ReverbEnergyIntegral(0.7), 0.7), 2.0, 1e-12);
  EXPECT_EQ(ReverbGain(0.0, 1.0), 0.0);
  const double g = ReverbGain(0.37, 1.9);
  EXPECT_NEAR(g * g * ReverbEnergyIntegral(1.9), 0.37, 1e-14);
}

TEST(PredelayTest, FirstNonZeroBinAcrossBands) {
  LowRateIR ir(100, 100.0);
  EXPECT_FALSE(EstimatePredelay(ir).has_value());
  ir.intensity(2, 12) = 1.0;
  EXPECT_NEAR(*EstimatePredelay(ir), 0.12, 1e-12);
  LowRateIR mixed(100, 100.0);
  mixed.intensity(0, 9) = 1.0;
  mixed.intensity(3, 5) = 1.0;
  EXPECT_NEAR(*EstimatePredelay(mixed), 0.05, 1e-12);
  LowRateIR zero(100, 100.0);
  zero.intensity(1, 0) = 1.0;
  EXPECT_EQ(*EstimatePredelay(zero), 0.0);
}

TEST(DirectivityTest, AverageDirectivityExamples) {
  const Vec3 d = Vec3(1, 2, -0.5).normalized();
  LowRateIR single(50, 100.0);
  for (int k = 10; k < 40; ++k) {
    single.Add(k / 100.0, FilledBands(std::exp(-0.1 * k)), d);
  }
  const auto avg = AverageDirectivity(single, 1);
  ASSERT_TRUE(avg.has_value());
  EXPECT_LT((*DominantDirection(*avg) - d).norm(), 1e-12);

  LowRateIR opposite(50, 100.0);
  opposite.Add(0.1, FilledBands(1.0), Vec3::UnitX());
  opposite.Add(0.2, FilledBands(1.0), -Vec3::UnitX());
  const auto sym = AverageDirectivity(opposite, 0);
  EXPECT_GT((*sym)[0], 0.0);
  EXPECT_NEAR((*sym)[1], 0.0, 1e-15);
  EXPECT_NEAR((*sym)[3], 0.0, 1e-15);

  LowRateIR weighted(50, 100.0);
  weighted.Add(0.1, FilledBands(3.0), Vec3::UnitX());
  weighted.Add(0.2, FilledBands(1.0), -Vec3::UnitX());
  EXPECT_LT((*DominantDirection(*AverageDirectivity(weighted, 2)) -
             Vec3::UnitX()).norm(),
            1e-12);

  EXPECT_FALSE(AverageDirectivity(LowRateIR(50, 100.0), 0).has_value());
}

TEST(DirectivityTest, CombInputDirectivityInterpolates) {
  LowRateIR ir(100, 100.0);
  ir.Add(0.10, FilledBands(1.0), Vec3::UnitZ());  // predelay 0.1 s
  ir.Add(0.20, FilledBands(1.0), Vec3::UnitX());
  ir.Add(0.21, FilledBands(1.0), Vec3::UnitY());
  const std::vector<double> delays = {0.10, 0.105, 5.0};
  const auto dirs = CombInputDirectivities(ir, delays);
  ASSERT_EQ(dirs.size(), 3u);
  EXPECT_LT((*DominantDirection(dirs[0]) - Vec3::UnitX()).norm(), 1e-9);
  EXPECT_LT((*DominantDirection(dirs[1]) - Vec3(1, 1, 0).normalized()).norm(),
            1e-3);
  // Past the end: average over the whole IR.
  EXPECT_LT((*DominantDirection(dirs[2]) - Vec3(1, 1, 1).normalized()).norm(),
            1e-9);
  const auto silent = CombInputDirectivities(LowRateIR(10, 100.0), delays);
  for (const SHVector& v : silent) EXPECT_FALSE(DominantDirection(v));
}

TEST(CombDelayTest, DrawsFollowTheMeanFreePath) {
  const double mfp = 6.667, c = 343.0;
  const double center = mfp / c;
  std::vector<double> all;
  Rng base(33);
  for (int i = 0; i < 125; ++i) {
    Rng rng = base.Derive(i);
    const CombDelaySet set = CombDelayTimes(mfp, c, 8, 44100.0, rng);
    EXPECT_NEAR(set.center, center, 1e-15);
    std::set<int> distinct(set.samples.begin(), set.samples.end());
    EXPECT_EQ(distinct.size(), 8u);
    for (size_t k = 0; k < set.samples.size(); ++k) {
      EXPECT_TRUE(IsPrime(set.samples[k]));
      EXPECT_GE(set.delays[k], kMinCombDelay);
      EXPECT_DOUBLE_EQ(set.delays[k], set.samples[k] / 44100.0);
      all.push_back(set.delays[k]);
    }
  }
  const double mean = std::accumulate(all.begin(), all.end(), 0.0) / all.size();
  EXPECT_NEAR(mean, center, 3.0 * (center / 3.0) / std::sqrt(all.size()));
}

TEST(CombDelayTest, SuppressesSmallCenterChanges) {
  Rng rng(34);
  const CombDelaySet first = CombDelayTimes(6.667, 343.0, 8, 44100.0, rng);
  // 19.44 ms -> 20 ms moves less than 2 sigma = 12.96 ms.
  const CombDelaySet same =
      CombDelayTimes(0.020 * 343.0, 343.0, 8, 44100.0, rng, &first);
  EXPECT_EQ(same.samples, first.samples);
  EXPECT_EQ(same.center, first.center);
  const CombDelaySet moved =
      CombDelayTimes(0.040 * 343.0, 343.0, 8, 44100.0, rng, &first);
  EXPECT_NE(moved.samples, first.samples);
}

TEST(CombDelayTest, ShortDrawsClampToOneMillisecond) {
  Rng rng(35);
  // Center 0.1 ms: every draw falls below the floor.
  const CombDelaySet set = CombDelayTimes(0.0343, 343.0, 8, 44100.0, rng);
  for (double d : set.delays) EXPECT_GE(d, kMinCombDelay);
  EXPECT_EQ(set.samples[0], NextPrime(44));
}

TEST(AnalyzerTest, ColdStartSilentThenSmooths) {
  IrAnalyzer analyzer(AnalysisConfig{});
  Rng rng(36);
  const ReverbParams cold = analyzer.Analyze(LowRateIR(800, 100.0), 0.0, 0.1,
                                             rng);
  EXPECT_TRUE(cold.silent);
  EXPECT_DOUBLE_EQ(cold.rt60[0], 1.0);
  EXPECT_DOUBLE_EQ(cold.reverb_gain[0], 0.0);

  LowRateIR ir(800, 100.0);
  const auto decay = ExponentialIr(1.5, 100.0, 8.0, 0.01);
  for (int k = 20; k < 800; ++k) {
    ir.Add(k / 100.0, FilledBands(decay[k]), Vec3::UnitY());
  }
  const ReverbParams first = analyzer.Analyze(ir, 6.667, 0.1, rng);
  EXPECT_FALSE(first.silent);
  EXPECT_NEAR(first.rt60[2], 1.5, 0.03);
  EXPECT_NEAR(first.predelay, 0.2, 1e-12);
  EXPECT_EQ(first.comb_delays.size(), static_cast<size_t>(kNumCombs));
  EXPECT_NEAR(first.reverb_gain[1] * first.reverb_gain[1] *
                  ReverbEnergyIntegral(first.rt60[1]),
              first.total_intensity[1], 1e-12);

  // A silent frame keeps the previous values.
  const ReverbParams kept = analyzer.Analyze(LowRateIR(800, 100.0), 6.667,
                                             0.1, rng);
  EXPECT_TRUE(kept.silent);
  EXPECT_DOUBLE_EQ(kept.rt60[0], first.rt60[0]);
  EXPECT_DOUBLE_EQ(kept.reverb_gain[0], first.reverb_gain[0]);
}

TEST(AnalyzerTest, FullAnalysisIsFast) {
  IrAnalyzer analyzer(AnalysisConfig{});
  Rng rng(37);
  LowRateIR ir(800, 100.0);
  const auto decay = ExponentialIr(1.0, 100.0, 8.0);
  for (int k = 3; k < 800; ++k) {
    ir.Add(k / 100.0, FilledBands(decay[k]), Vec3::UnitX());
  }
  analyzer.Analyze(ir, 6.0, 0.1, rng);
  const int reps = 50;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) analyzer.Analyze(ir, 6.0, 0.1, rng);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count() /
                    reps;
  EXPECT_LT(ms, 1.0);
}

}  // namespace
}  // namespace echoforge
