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

#ifndef ECHOFORGE_IR_ANALYSIS_H_
#define ECHOFORGE_IR_ANALYSIS_H_

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "echoforge/propagation.h"
#include "echoforge/rng.h"
#include "echoforge/sh.h"
#include "echoforge/types.h"

namespace echoforge {

inline constexpr int kNumCombs = 8;
inline constexpr double kMinCombDelay = 0.001;

// Parameters handed from analysis to the reverberator.
struct ReverbParams {
  BandArray rt60 = FilledBands(1.0);
  BandArray reverb_gain = FilledBands(0.0);
  BandArray total_intensity = FilledBands(0.0);
  double predelay = 0.0;
  double mean_free_path = 0.0;
  std::array<SHVector, kNumBands> avg_directivity;
  std::vector<SHVector> comb_input_directivity;
  std::vector<double> comb_delays;        // seconds
  std::vector<int> comb_delay_samples;    // at the render rate
  double comb_delay_center = 0.0;         // mean free path / c
  std::array<bool, kNumBands> band_silent = {true, true, true, true};
  bool silent = true;
};

// Backward-integrated energy decay curve in dB relative to the total,
// starting at bin 0 and ending at the last non-zero bin.
std::vector<double> EnergyDecayCurveDb(std::span<const double> ir);

// RT60 of one band by a line fit to the EDC between -5 and -35 dB (falling
// back to -25 dB). Returns nullopt for fewer than 3 non-zero bins or a
// non-negative slope. The result is clamped to [0.05, max_rt].
std::optional<double> EstimateRt60(std::span<const double> ir,
                                   double sample_rate,
                                   double max_rt = kDefaultMaxRt);

// alpha * new + (1 - alpha) * cached, alpha = 1 - exp(-dt / tau).
double SmoothParameter(double new_value, double cached, double tau, double dt);

// Integral of 10^(-6 t / rt60) over t >= 0, i.e. rt60 / (6 ln 10).
double ReverbEnergyIntegral(double rt60);

// sqrt(total_intensity / ReverbEnergyIntegral(rt60)); zero for zero input.
double ReverbGain(double total_intensity, double rt60);

// Time of the first non-zero bin in any band; nullopt for a silent IR.
std::optional<double> EstimatePredelay(const LowRateIR& ir);

// Intensity-weighted average first-order directivity of a band.
std::optional<SHVector> AverageDirectivity(const LowRateIR& ir, int band);

// Broadband directivity at predelay + delay for each comb delay, by linear
// interpolation between adjacent bins. Offsets past the end of the IR (or
// landing on empty bins) use the broadband average; a silent IR yields
// isotropic vectors.
std::vector<SHVector> CombInputDirectivities(const LowRateIR& ir,
                                             std::span<const double> delays);

// Smallest prime >= n (n >= 2 assumed for meaningful results).
int NextPrime(int n);

struct CombDelaySet {
  double center = 0.0;              // seconds
  std::vector<double> delays;       // seconds, delays[i] = samples[i] / rate
  std::vector<int> samples;
};

// Comb delays drawn from N(center, center / 3) with center = mean free path
// / c, clamped to >= 1 ms and moved to distinct prime sample counts. When
// `previous` is given and the new center is within 2 sigma of the previous
// one, the previous set is returned unchanged.
CombDelaySet CombDelayTimes(double mean_free_path, double speed_of_sound,
                            int num_combs, double render_rate, Rng& rng,
                            const CombDelaySet* previous = nullptr);

struct AnalysisConfig {
  double tau_lr = 3.0;
  double max_rt = kDefaultMaxRt;
  double render_rate = 44100.0;
  double speed_of_sound = kDefaultSpeedOfSound;
  int num_combs = kNumCombs;
};

// Stateful per-source analysis: smoothing, silent-band handling and the
// comb delay update rule live here.
class IrAnalyzer {
 public:
  explicit IrAnalyzer(AnalysisConfig config) : config_(config) {}

  ReverbParams Analyze(const LowRateIR& ir, double mean_free_path, double dt,
                       Rng& rng);

  const std::optional<ReverbParams>& previous() const { return previous_; }

 private:
  AnalysisConfig config_;
  std::optional<ReverbParams> previous_;
  std::optional<CombDelaySet> delays_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_IR_ANALYSIS_H_
