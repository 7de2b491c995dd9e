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

#include "echoforge/acoustic_metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "echoforge/ir_analysis.h"

namespace echoforge {

AcousticMetrics ComputeAcousticMetrics(const BandIntensities& intensity,
                                       double sample_rate, int direct_index,
                                       double reference_intensity,
                                       double max_rt) {
  if (direct_index < 0) direct_index = FirstNonZero(intensity);
  if (direct_index < 0) {
    throw std::invalid_argument("acoustic metrics of a silent response");
  }
  if (!(reference_intensity > 0.0)) {
    throw std::invalid_argument("reference intensity must be positive");
  }
  const size_t k80 = direct_index + static_cast<size_t>(
                                        std::lround(0.080 * sample_rate));
  const size_t k50 = direct_index + static_cast<size_t>(
                                        std::lround(0.050 * sample_rate));
  AcousticMetrics m;
  for (int b = 0; b < kNumBands; ++b) {
    const std::vector<double>& x = intensity[b];
    double total = 0.0, e80 = 0.0, e50 = 0.0, moment = 0.0;
    for (size_t k = direct_index; k < x.size(); ++k) {
      total += x[k];
      if (k < k80) e80 += x[k];
      if (k < k50) e50 += x[k];
      moment += x[k] * (k - direct_index) / sample_rate;
    }
    if (!(total > 0.0)) continue;
    const std::span<const double> tail(x.data() + direct_index,
                                       x.size() - direct_index);
    m.rt60[b] = EstimateRt60(tail, sample_rate, max_rt).value_or(0.0);
    const double late = total - e80;
    m.c80[b] = late > 0.0 ? std::min(10.0 * std::log10(e80 / late),
                                     kC80Ceiling)
                          : kC80Ceiling;
    m.d50[b] = std::clamp(e50 / total, 0.0, 1.0);
    m.g[b] = 10.0 * std::log10(total / reference_intensity);
    m.ts[b] = moment / total;
  }
  return m;
}

BandIntensities HistogramIntensities(const LowRateIR& histogram) {
  BandIntensities out;
  for (int b = 0; b < kNumBands; ++b) out[b] = histogram.band(b);
  return out;
}

int FirstNonZero(const BandIntensities& intensity) {
  int first = -1;
  for (const auto& band : intensity) {
    for (size_t k = 0; k < band.size(); ++k) {
      if (band[k] > 0.0) {
        if (first < 0 || static_cast<int>(k) < first) first = k;
        break;
      }
    }
  }
  return first;
}

}  // namespace echoforge
