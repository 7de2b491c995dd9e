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
#include <stdexcept>

namespace echoforge {
namespace {

constexpr double kButterworthQ = 0.70710678118654752440;

struct Prewarp {
  double cos_w;
  double alpha;
};

Prewarp Warp(double cutoff, double sample_rate, double q) {
  if (!(cutoff > 0.0) || !(cutoff < sample_rate / 2.0)) {
    throw std::invalid_argument("cutoff must lie in (0, Nyquist)");
  }
  const double w = 2.0 * kPi * cutoff / sample_rate;
  return {std::cos(w), std::sin(w) / (2.0 * q)};
}

}  // namespace

Biquad Biquad::LowPass(double cutoff, double sample_rate, double q) {
  const auto [c, a] = Warp(cutoff, sample_rate, q);
  const double a0 = 1.0 + a;
  return Biquad((1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0,
                -2.0 * c / a0, (1.0 - a) / a0);
}

Biquad Biquad::HighPass(double cutoff, double sample_rate, double q) {
  const auto [c, a] = Warp(cutoff, sample_rate, q);
  const double a0 = 1.0 + a;
  return Biquad((1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0,
                -2.0 * c / a0, (1.0 - a) / a0);
}

Biquad Biquad::AllPass(double cutoff, double sample_rate, double q) {
  const auto [c, a] = Warp(cutoff, sample_rate, q);
  const double a0 = 1.0 + a;
  return Biquad((1.0 - a) / a0, -2.0 * c / a0, 1.0, -2.0 * c / a0,
                (1.0 - a) / a0);
}

std::complex<double> Biquad::Response(double freq, double sample_rate) const {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * kPi * freq / sample_rate);
  const std::complex<double> z2 = z1 * z1;
  return (b0_ + b1_ * z1 + b2_ * z2) / (1.0 + a1_ * z1 + a2_ * z2);
}

LinkwitzRiley4::LinkwitzRiley4(double cutoff, double sample_rate)
    : lp1_(Biquad::LowPass(cutoff, sample_rate, kButterworthQ)),
      lp2_(lp1_),
      hp1_(Biquad::HighPass(cutoff, sample_rate, kButterworthQ)),
      hp2_(hp1_) {}

void LinkwitzRiley4::Reset() {
  lp1_.Reset();
  lp2_.Reset();
  hp1_.Reset();
  hp2_.Reset();
}

std::complex<double> LinkwitzRiley4::LowResponse(double freq,
                                                 double sample_rate) const {
  return lp1_.Response(freq, sample_rate) * lp2_.Response(freq, sample_rate);
}

std::complex<double> LinkwitzRiley4::HighResponse(double freq,
                                                  double sample_rate) const {
  return hp1_.Response(freq, sample_rate) * hp2_.Response(freq, sample_rate);
}

CrossoverBank::CrossoverBank(double sample_rate)
    : sample_rate_(sample_rate),
      mid_(kBandSplitsHz[1], sample_rate),
      low_(kBandSplitsHz[0], sample_rate),
      high_(kBandSplitsHz[2], sample_rate),
      low_comp_(Biquad::AllPass(kBandSplitsHz[2], sample_rate, kButterworthQ)),
      high_comp_(
          Biquad::AllPass(kBandSplitsHz[0], sample_rate, kButterworthQ)) {}

void CrossoverBank::ProcessSample(double x,
                                  std::array<double, kNumBands>& bands) {
  double lo, hi;
  mid_.Process(x, lo, hi);
  low_.Process(low_comp_.Process(lo), bands[0], bands[1]);
  high_.Process(high_comp_.Process(hi), bands[2], bands[3]);
}

void CrossoverBank::Process(
    std::span<const double> input,
    const std::array<std::span<double>, kNumBands>& bands) {
  std::array<double, kNumBands> out;
  for (size_t n = 0; n < input.size(); ++n) {
    ProcessSample(input[n], out);
    for (int b = 0; b < kNumBands; ++b) bands[b][n] = out[b];
  }
}

void CrossoverBank::Reset() {
  mid_.Reset();
  low_.Reset();
  high_.Reset();
  low_comp_.Reset();
  high_comp_.Reset();
}

std::array<std::complex<double>, kNumBands> CrossoverBank::BandResponse(
    double freq) const {
  const double fs = sample_rate_;
  const auto lo = mid_.LowResponse(freq, fs) * low_comp_.Response(freq, fs);
  const auto hi = mid_.HighResponse(freq, fs) * high_comp_.Response(freq, fs);
  return {lo * low_.LowResponse(freq, fs), lo * low_.HighResponse(freq, fs),
          hi * high_.LowResponse(freq, fs), hi * high_.HighResponse(freq, fs)};
}

}  // namespace echoforge
