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

#ifndef ECHOFORGE_CROSSOVER_H_
#define ECHOFORGE_CROSSOVER_H_

#include <array>
#include <complex>
#include <span>

#include "echoforge/types.h"

namespace echoforge {

// Second-order IIR section in transposed direct form II.
class Biquad {
 public:
  Biquad() = default;
  Biquad(double b0, double b1, double b2, double a1, double a2)
      : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2) {}

  // Bilinear-transform designs with the cutoff prewarped.
  static Biquad LowPass(double cutoff, double sample_rate, double q);
  static Biquad HighPass(double cutoff, double sample_rate, double q);
  static Biquad AllPass(double cutoff, double sample_rate, double q);

  double Process(double x) {
    const double y = b0_ * x + z1_;
    z1_ = b1_ * x - a1_ * y + z2_;
    z2_ = b2_ * x - a2_ * y;
    return y;
  }
  void Reset() { z1_ = z2_ = 0.0; }

  std::complex<double> Response(double freq, double sample_rate) const;

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
  double z1_ = 0.0, z2_ = 0.0;
};

// Fourth-order Linkwitz-Riley split: two cascaded Butterworth sections per
// branch. low + high is a second-order all-pass.
class LinkwitzRiley4 {
 public:
  LinkwitzRiley4() = default;
  LinkwitzRiley4(double cutoff, double sample_rate);

  void Process(double x, double& low, double& high) {
    low = lp2_.Process(lp1_.Process(x));
    high = hp2_.Process(hp1_.Process(x));
  }
  void Reset();

  std::complex<double> LowResponse(double freq, double sample_rate) const;
  std::complex<double> HighResponse(double freq, double sample_rate) const;

 private:
  Biquad lp1_, lp2_, hp1_, hp2_;
};

// Four-band crossover at 176, 775 and 3408 Hz. The middle split runs first;
// each half then gets the other half's split all-pass so the band sum is a
// pure all-pass response.
class CrossoverBank {
 public:
  explicit CrossoverBank(double sample_rate);

  double sample_rate() const { return sample_rate_; }

  void ProcessSample(double x, std::array<double, kNumBands>& bands);

  // Streams `input` into four band outputs of the same length.
  void Process(std::span<const double> input,
               const std::array<std::span<double>, kNumBands>& bands);

  void Reset();

  // Complex response of each band at `freq`.
  std::array<std::complex<double>, kNumBands> BandResponse(double freq) const;

 private:
  double sample_rate_;
  LinkwitzRiley4 mid_, low_, high_;
  // The low half sees the 3408 Hz all-pass, the high half the 176 Hz one.
  Biquad low_comp_, high_comp_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_CROSSOVER_H_
