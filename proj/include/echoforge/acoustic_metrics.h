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

#ifndef ECHOFORGE_ACOUSTIC_METRICS_H_
#define ECHOFORGE_ACOUSTIC_METRICS_H_

#include <array>
#include <vector>

#include "echoforge/propagation.h"
#include "echoforge/types.h"

namespace echoforge {

inline constexpr double kC80Ceiling = 99.0;

struct AcousticMetrics {
  BandArray rt60 = FilledBands(0.0);  // s
  BandArray c80 = FilledBands(0.0);   // dB
  BandArray d50 = FilledBands(0.0);   // fraction
  BandArray g = FilledBands(0.0);     // dB
  BandArray ts = FilledBands(0.0);    // s
};

using BandIntensities = std::array<std::vector<double>, kNumBands>;

// Squared-pressure sequences per band at `sample_rate`. Times are measured
// from `direct_index`. G is relative to `reference_intensity`, the direct
// intensity of the same source at 10 m in free field. Silent bands report
// zeros; an all-silent input throws std::invalid_argument.
AcousticMetrics ComputeAcousticMetrics(const BandIntensities& intensity,
                                       double sample_rate, int direct_index,
                                       double reference_intensity,
                                       double max_rt = kDefaultMaxRt);

// Band intensities of an energy histogram.
BandIntensities HistogramIntensities(const LowRateIR& histogram);

// First bin with energy in any band, or -1.
int FirstNonZero(const BandIntensities& intensity);

}  // namespace echoforge

#endif  // ECHOFORGE_ACOUSTIC_METRICS_H_
