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

#ifndef ECHOFORGE_EARLY_RENDERER_H_
#define ECHOFORGE_EARLY_RENDERER_H_

#include <map>
#include <span>
#include <vector>

#include "echoforge/delay_line.h"
#include "echoforge/propagation.h"

namespace echoforge {

inline constexpr int kMaxEarlyPaths = 100;
// Intensity of the threshold of hearing, 0 dB SPL.
inline constexpr double kHearingThreshold = 1e-12;
inline constexpr int kRenderShOrder = kDirectShOrder;
inline constexpr int kRenderShChannels = ShCount(kRenderShOrder);

struct EarlySelection {
  std::vector<PathList> rendered;  // per source
  std::vector<PathList> dropped;   // per source, for IR reinjection
  int dropped_count = 0;
  int below_threshold = 0;
};

// Drops reflection paths below the hearing threshold, sorts the rest by
// decreasing intensity across all sources and keeps the first `max_paths`.
// Ties are broken by path key so the result is deterministic.
EarlySelection SelectEarlyPaths(const std::vector<PathList>& per_source,
                                int max_paths = kMaxEarlyPaths,
                                double threshold = kHearingThreshold);

// Adds dropped reflection paths to a low-rate IR at their delays, keeping
// their first-order directivity.
void InjectPaths(LowRateIR& ir, std::span<const PathEntry> paths);

// Renders a set of delay taps from a 4-band delay line into a broadband SH
// signal. Each tap reads every band at a fractional delay, weights the bands
// by the path pressure and encodes the sum with the path directivity. Delay,
// pressure and directivity move linearly from their old to their new values
// over the ramp set by SetPaths(), which produces Doppler shifts for moving
// paths. Paths that disappear fade out over the same ramp.
class TapRenderer {
 public:
  TapRenderer() = default;

  // Delays beyond `max_delay_samples` are clamped and counted.
  void SetPaths(std::span<const PathEntry> paths, double sample_rate,
                int ramp_samples, double max_delay_samples);

  // Accumulates the taps for the current sample into `out`
  // (kRenderShChannels values) and advances the ramps by one sample.
  void RenderSample(const DelayLine& line, std::span<double> out);

  int active_paths() const { return static_cast<int>(taps_.size()); }
  int clamped_delays() const { return clamped_; }

 private:
  struct Tap {
    double delay;
    double delay_step = 0.0;
    BandArray pressure;
    BandArray pressure_step = FilledBands(0.0);
    std::array<double, kRenderShChannels> coeffs{};
    std::array<double, kRenderShChannels> coeffs_step{};
    int channels = 1;
    int remaining = 0;
    bool fading_out = false;
  };
  std::map<PathKey, Tap> taps_;
  int clamped_ = 0;
};

}  // namespace echoforge

#endif  // ECHOFORGE_EARLY_RENDERER_H_
