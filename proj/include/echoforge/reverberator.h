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

#ifndef ECHOFORGE_REVERBERATOR_H_
#define ECHOFORGE_REVERBERATOR_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "echoforge/delay_line.h"
#include "echoforge/ir_analysis.h"
#include "echoforge/types.h"

namespace echoforge {

// Channels of the reverberator's SH signal: order 1 for each band.
inline constexpr int kReverbShChannels = 4;
inline constexpr int kReverbChannels = kReverbShChannels * kNumBands;

// Feedback gain that makes a comb of delay t_comb decay by 60 dB in rt60.
double CombFeedbackGain(double comb_delay, double rt60);

struct ReverbConfig {
  double sample_rate = 44100.0;
  std::array<double, 4> allpass_delays_ms = {5.0, 1.7, 0.61, 0.23};
  double allpass_gain = 0.7;
  uint64_t seed = 0;            // feedback rotations
  bool rotate_feedback = true;  // false: identity feedback rotations
};

// Schroeder all-pass on 16 independent channels.
class AllPassSH {
 public:
  AllPassSH(int delay_samples, double gain);

  int delay() const { return delay_; }
  double gain() const { return gain_; }

  // In-place on one sample frame of kReverbChannels values.
  void Process(std::span<double> frame);
  void Clear() { line_.Clear(); }

 private:
  int delay_;
  double gain_;
  DelayLine line_;
  std::array<double, kReverbChannels> scratch_{};
};

// Comb filter whose feedback path applies an order-1 SH rotation and a
// per-band gain. The output is the delayed signal, so an impulse produces
// echoes at k * delay (k >= 1) with amplitude g^(k-1).
class CombFilterSH {
 public:
  CombFilterSH(int delay_samples, const Eigen::Matrix4d& rotation);

  int delay() const { return delay_; }
  const Eigen::Matrix4d& rotation() const { return rotation_; }

  // `input` holds the already encoded per-band input (kReverbChannels);
  // the delayed output is added to `output`.
  void Process(std::span<const double> input, const BandArray& gains,
               std::span<double> output);
  void Clear() { line_.Clear(); }

 private:
  int delay_;
  Eigen::Matrix4d rotation_;
  DelayLine line_;
  std::array<double, kReverbChannels> write_{};
};

// SH-domain Schroeder reverberator for one source: parallel rotated combs,
// series all-passes, then per-band directional loudness and gain.
class Reverberator {
 public:
  explicit Reverberator(ReverbConfig config);

  // Takes effect at the next Process() call; gains, input encodings and
  // loudness matrices are crossfaded across that block. Comb buffers are
  // rebuilt (and cleared) only when the comb delays change.
  void SetParams(const ReverbParams& params);

  // `input[b]` is band b of the source signal read at the predelay tap.
  // `output` receives n * kReverbChannels samples, frame-major, channel
  // index band * 4 + acn.
  void Process(const std::array<std::span<const double>, kNumBands>& input,
               std::span<double> output);

  void Clear();

  int num_combs() const { return static_cast<int>(combs_.size()); }
  const CombFilterSH& comb(int i) const { return combs_[i]; }
  const std::vector<AllPassSH>& allpasses() const { return allpasses_; }

  // Per-band calibration making the unscaled impulse response carry
  // rt60 / (6 ln 10) of energy in the omnidirectional channel.
  static double Calibration(std::span<const double> comb_delays, double rt60);

  // Per-band loudness matrix used for a directivity (4pi-scaled, with its
  // omnidirectional row normalized to unit length).
  static Eigen::Matrix4d LoudnessMatrix(const SHVector& avg_directivity);

 private:
  struct Targets {
    std::vector<BandArray> comb_gains;                  // per comb
    std::vector<Eigen::Vector4d> encodings;             // per comb
    BandArray output_gain = FilledBands(0.0);
    std::array<Eigen::Matrix4d, kNumBands> loudness;
  };
  Targets MakeTargets(const ReverbParams& params) const;
  void BuildCombs(const std::vector<int>& delays);

  ReverbConfig config_;
  std::vector<CombFilterSH> combs_;
  std::vector<AllPassSH> allpasses_;
  std::vector<Eigen::Matrix4d> rotations_;
  Targets current_;
  Targets next_;
  bool has_params_ = false;
  bool pending_ = false;
  std::vector<double> encoded_;
  std::vector<double> mixed_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_REVERBERATOR_H_
