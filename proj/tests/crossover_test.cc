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

#include "echoforge/crossover.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace echoforge {
namespace {

using namespace testing;

// Steady-state amplitude of each band and of the band sum for a sine,
// measured by a least-squares sin/cos fit after the filters settle.
struct SineMeasurement {
  std::array<double, kNumBands> band;
  double sum;
};

double FitAmplitude(std::span<const double> y, double freq, double fs,
                    size_t start) {
  double ss = 0, cc = 0, sc = 0, ys = 0, yc = 0;
  for (size_t n = start; n < y.size(); ++n) {
    const double s = std::sin(2 * kPi * freq * n / fs);
    const double c = std::cos(2 * kPi * freq * n / fs);
    ss += s * s;
    cc += c * c;
    sc += s * c;
    ys += y[n] * s;
    yc += y[n] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  return std::hypot(a, b);
}

SineMeasurement MeasureSine(double freq, double fs) {
  CrossoverBank bank(fs);
  // At least 20 cycles after a settling time long enough for 20 Hz.
  const size_t settle = static_cast<size_t>(0.5 * fs);
  const size_t len = settle + static_cast<size_t>(std::max(20.0 / freq, 0.05) * fs);
  std::vector<double> x(len);
  for (size_t n = 0; n < len; ++n) x[n] = std::sin(2 * kPi * freq * n / fs);
  std::array<std::vector<double>, kNumBands> bands;
  std::array<std::span<double>, kNumBands> spans;
  for (int b = 0; b < kNumBands; ++b) {
    bands[b].resize(len);
    spans[b] = bands[b];
  }
  bank.Process(x, spans);
  SineMeasurement m;
  std::vector<double> sum(len, 0.0);
  for (int b = 0; b < kNumBands; ++b) {
    m.band[b] = FitAmplitude(bands[b], freq, fs, settle);
    for (size_t n = 0; n < len; ++n) sum[n] += bands[b][n];
  }
  m.sum = FitAmplitude(sum, freq, fs, settle);
  return m;
}

double Db(double a) { return 20.0 * std::log10(a); }

TEST(CrossoverTest, DcGoesToTheLowestBand) {
  CrossoverBank bank(44100.0);
  std::array<double, kNumBands> out{};
  for (int n = 0; n < 44100; ++n) bank.ProcessSample(1.0, out);
  EXPECT_NEAR(out[0], 1.0, 1e-3);
  for (int b = 1; b < kNumBands; ++b) EXPECT_NEAR(out[b], 0.0, 1e-3);
}

TEST(CrossoverTest, BandSumIsFlat) {
  for (double fs : {44100.0, 48000.0}) {
    for (double f = 20.0; f <= 0.9 * fs / 2; f *= 1.25) {
      const SineMeasurement m = MeasureSine(f, fs);
      EXPECT_LE(std::abs(Db(m.sum)), 0.5) << f << " Hz at " << fs;
    }
    const SineMeasurement top = MeasureSine(0.9 * fs / 2, fs);
    EXPECT_LE(std::abs(Db(top.sum)), 0.5);
  }
}

TEST(CrossoverTest, SplitPointsAreMinusSixDb) {
  for (double fs : {44100.0, 48000.0}) {
    for (int k = 0; k < kNumBands - 1; ++k) {
      const SineMeasurement m = MeasureSine(kBandSplitsHz[k], fs);
      EXPECT_NEAR(Db(m.band[k]), -6.0, 0.5) << kBandSplitsHz[k];
      EXPECT_NEAR(Db(m.band[k + 1]), -6.0, 0.5) << kBandSplitsHz[k];
    }
  }
}

TEST(CrossoverTest, AnalyticResponseMatchesMeasurement) {
  const double fs = 44100.0;
  CrossoverBank bank(fs);
  for (double f : {50.0, 176.0, 400.0, 1000.0, 3408.0, 10000.0}) {
    const SineMeasurement m = MeasureSine(f, fs);
    const auto h = bank.BandResponse(f);
    for (int b = 0; b < kNumBands; ++b) {
      EXPECT_NEAR(std::abs(h[b]), m.band[b], 2e-3) << f << " band " << b;
    }
  }
}

TEST(CrossoverTest, StreamingMatchesOneShot) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(5000);
  for (double& v : x) v = u(gen);
  CrossoverBank whole(48000.0), chunked(48000.0);
  std::array<std::vector<double>, kNumBands> a, b;
  std::array<std::span<double>, kNumBands> sa;
  for (int k = 0; k < kNumBands; ++k) {
    a[k].resize(x.size());
    b[k].resize(x.size());
    sa[k] = a[k];
  }
  whole.Process(x, sa);
  size_t pos = 0;
  for (size_t chunk : {1u, 7u, 256u, 1000u, 3736u}) {
    std::array<std::span<double>, kNumBands> sb;
    for (int k = 0; k < kNumBands; ++k) sb[k] = std::span(b[k]).subspan(pos, chunk);
    chunked.Process(std::span<const double>(x).subspan(pos, chunk), sb);
    pos += chunk;
  }
  ASSERT_EQ(pos, x.size());
  for (int k = 0; k < kNumBands; ++k) EXPECT_EQ(a[k], b[k]);
}

TEST(CrossoverTest, ResetClearsState) {
  CrossoverBank bank(44100.0);
  std::array<double, kNumBands> out{};
  for (int n = 0; n < 100; ++n) bank.ProcessSample(1.0, out);
  bank.Reset();
  bank.ProcessSample(0.0, out);
  for (double v : out) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace echoforge
