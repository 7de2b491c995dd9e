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

#include "echoforge/reverberator.h"

#include <cmath>
#include <stdexcept>

#include "echoforge/rng.h"
#include "echoforge/sh.h"
#include "echoforge/sh_rotation.h"
#include "echoforge/tdesign.h"

namespace echoforge {

double CombFeedbackGain(double comb_delay, double rt60) {
  if (!(rt60 > 0.0)) throw std::invalid_argument("rt60 must be positive");
  return std::pow(10.0, -3.0 * comb_delay / rt60);
}

AllPassSH::AllPassSH(int delay_samples, double gain)
    : delay_(std::max(delay_samples, 1)),
      gain_(gain),
      line_(kReverbChannels, delay_ + 1) {
  if (!(gain >= 0.0 && gain < 1.0)) {
    throw std::invalid_argument("all-pass gain must be in [0, 1)");
  }
}

void AllPassSH::Process(std::span<double> frame) {
  for (int ch = 0; ch < kReverbChannels; ++ch) {
    const double delayed = line_.ReadInteger(ch, delay_ - 1);
    const double y = -gain_ * frame[ch] + delayed;
    scratch_[ch] = frame[ch] + gain_ * y;
    frame[ch] = y;
  }
  line_.Push(scratch_);
}

CombFilterSH::CombFilterSH(int delay_samples, const Eigen::Matrix4d& rotation)
    : delay_(std::max(delay_samples, 1)),
      rotation_(rotation),
      line_(kReverbChannels, delay_ + 1) {}

void CombFilterSH::Process(std::span<const double> input,
                           const BandArray& gains, std::span<double> output) {
  for (int b = 0; b < kNumBands; ++b) {
    Eigen::Vector4d v;
    for (int c = 0; c < kReverbShChannels; ++c) {
      v[c] = line_.ReadInteger(b * kReverbShChannels + c, delay_ - 1);
      output[b * kReverbShChannels + c] += v[c];
    }
    const Eigen::Vector4d fb = gains[b] * (rotation_ * v);
    for (int c = 0; c < kReverbShChannels; ++c) {
      const int ch = b * kReverbShChannels + c;
      write_[ch] = input[ch] + fb[c];
    }
  }
  line_.Push(write_);
}

Reverberator::Reverberator(ReverbConfig config) : config_(config) {
  for (double ms : config_.allpass_delays_ms) {
    allpasses_.emplace_back(
        static_cast<int>(std::lround(ms * 1e-3 * config_.sample_rate)),
        config_.allpass_gain);
  }
  encoded_.assign(kReverbChannels, 0.0);
  mixed_.assign(kReverbChannels, 0.0);
}

double Reverberator::Calibration(std::span<const double> comb_delays,
                                 double rt60) {
  const double n = static_cast<double>(comb_delays.size());
  double energy = 0.0;
  for (double t : comb_delays) {
    const double g = CombFeedbackGain(t, rt60);
    energy += 1.0 / (n * n * (1.0 - g * g));
  }
  if (energy <= 0.0) return 0.0;
  return std::sqrt(ReverbEnergyIntegral(rt60) / energy);
}

Eigen::Matrix4d Reverberator::LoudnessMatrix(const SHVector& avg_directivity) {
  const SHVector scaled = avg_directivity.Resized(1) * (4.0 * kPi);
  Eigen::Matrix4d d = DirectionalLoudnessMatrix(scaled, 1);
  const double row = d.row(0).norm();
  if (row <= 0.0) return Eigen::Matrix4d::Zero();
  return d / row;
}

void Reverberator::BuildCombs(const std::vector<int>& delays) {
  if (rotations_.size() < delays.size()) {
    const Rng base(config_.seed);
    for (size_t i = rotations_.size(); i < delays.size(); ++i) {
      if (config_.rotate_feedback) {
        Rng rng = base.Derive(i);
        rotations_.push_back(
            SHRotation(RandomScatterRotation(rng), 1).matrix());
      } else {
        rotations_.push_back(Eigen::Matrix4d::Identity());
      }
    }
  }
  combs_.clear();
  for (size_t i = 0; i < delays.size(); ++i) {
    combs_.emplace_back(delays[i], rotations_[i]);
  }
}

Reverberator::Targets Reverberator::MakeTargets(
    const ReverbParams& params) const {
  Targets t;
  const int n = static_cast<int>(params.comb_delays.size());
  const TDesign& fallback = TDesignForDegree(3);
  for (int i = 0; i < n; ++i) {
    BandArray g;
    for (int b = 0; b < kNumBands; ++b) {
      g[b] = CombFeedbackGain(params.comb_delays[i], params.rt60[b]);
    }
    t.comb_gains.push_back(g);
    std::optional<Vec3> dir;
    if (i < static_cast<int>(params.comb_input_directivity.size())) {
      dir = DominantDirection(params.comb_input_directivity[i]);
    }
    if (!dir) dir = fallback.directions[i % fallback.directions.size()];
    t.encodings.push_back(EvalSH(*dir, 1).coeffs() / n);
  }
  for (int b = 0; b < kNumBands; ++b) {
    const bool silent = params.silent || params.band_silent[b];
    t.output_gain[b] =
        silent ? 0.0
               : params.reverb_gain[b] *
                     Calibration(params.comb_delays, params.rt60[b]);
    // An unset (all-zero) directivity means isotropic.
    t.loudness[b] = params.avg_directivity[b].coeffs().isZero(0.0)
                        ? Eigen::Matrix4d::Identity()
                        : LoudnessMatrix(params.avg_directivity[b]);
  }
  return t;
}

void Reverberator::SetParams(const ReverbParams& params) {
  std::vector<int> delays = params.comb_delay_samples;
  if (delays.empty()) {
    for (double t : params.comb_delays) {
      delays.push_back(static_cast<int>(std::lround(t * config_.sample_rate)));
    }
  }
  bool rebuild = delays.size() != combs_.size();
  for (size_t i = 0; !rebuild && i < delays.size(); ++i) {
    rebuild = combs_[i].delay() != delays[i];
  }
  if (rebuild) BuildCombs(delays);
  next_ = MakeTargets(params);
  if (!has_params_ || rebuild) {
    current_ = next_;
    pending_ = false;
    has_params_ = true;
  } else {
    pending_ = true;
  }
}

void Reverberator::Process(
    const std::array<std::span<const double>, kNumBands>& input,
    std::span<double> output) {
  const size_t frames = input[0].size();
  if (output.size() < frames * kReverbChannels) {
    throw std::invalid_argument("reverb output buffer too small");
  }
  std::fill(output.begin(), output.begin() + frames * kReverbChannels, 0.0);
  if (!has_params_) return;
  const int n_combs = static_cast<int>(combs_.size());
  for (size_t n = 0; n < frames; ++n) {
    const double t = pending_ ? static_cast<double>(n + 1) / frames : 1.0;
    std::fill(mixed_.begin(), mixed_.end(), 0.0);
    for (int i = 0; i < n_combs; ++i) {
      BandArray g = current_.comb_gains[i];
      Eigen::Vector4d enc = current_.encodings[i];
      if (pending_) {
        for (int b = 0; b < kNumBands; ++b) {
          g[b] += t * (next_.comb_gains[i][b] - g[b]);
        }
        enc += t * (next_.encodings[i] - enc);
      }
      for (int b = 0; b < kNumBands; ++b) {
        for (int c = 0; c < kReverbShChannels; ++c) {
          encoded_[b * kReverbShChannels + c] = enc[c] * input[b][n];
        }
      }
      combs_[i].Process(encoded_, g, mixed_);
    }
    for (AllPassSH& ap : allpasses_) ap.Process(mixed_);
    double* out = &output[n * kReverbChannels];
    for (int b = 0; b < kNumBands; ++b) {
      const Eigen::Map<const Eigen::Vector4d> v(&mixed_[b * kReverbShChannels]);
      Eigen::Vector4d y = current_.output_gain[b] * (current_.loudness[b] * v);
      if (pending_) {
        const Eigen::Vector4d y_next =
            next_.output_gain[b] * (next_.loudness[b] * v);
        y += t * (y_next - y);
      }
      for (int c = 0; c < kReverbShChannels; ++c) {
        out[b * kReverbShChannels + c] = y[c];
      }
    }
  }
  if (pending_) {
    current_ = next_;
    pending_ = false;
  }
}

void Reverberator::Clear() {
  for (CombFilterSH& c : combs_) c.Clear();
  for (AllPassSH& a : allpasses_) a.Clear();
}

}  // namespace echoforge
