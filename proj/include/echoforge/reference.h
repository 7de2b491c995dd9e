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

#ifndef ECHOFORGE_REFERENCE_H_
#define ECHOFORGE_REFERENCE_H_

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "echoforge/propagation.h"
#include "echoforge/ray_tracer.h"
#include "echoforge/reverberator.h"
#include "echoforge/rng.h"
#include "echoforge/scene.h"

namespace echoforge {

inline constexpr double kReferenceRate = 44100.0;

// Energy response of one source at the full audio rate.
struct FullRateIR {
  // Everything that reached the listener, binned per sample. Directivity is
  // carried at order 1 inside the histogram.
  LowRateIR histogram;
  // The deterministic subset of `histogram`: direct sound and validated
  // image-source reflections. These keep exact, positive taps in the
  // pressure response; the remainder gets a noise carrier.
  LowRateIR specular;
  int direct_index = -1;  // first non-zero bin, -1 when silent
  double mean_free_path = 0.0;
  bool non_decaying = false;
  double reference_intensity = 0.0;  // free-field direct intensity at 10 m

  double sample_rate() const { return histogram.sample_rate(); }
  int length() const { return histogram.length(); }

  // Pressure envelope sqrt(intensity) for one band.
  std::vector<double> Envelope(int band) const;
};

struct ReferenceConfig {
  int rays = 500;
  int max_order = 200;
  double max_rt = kDefaultMaxRt;
  double sample_rate = kReferenceRate;
  int direct_samples = 1024;
  int threads = 0;
};

FullRateIR BuildFullRateIR(const SceneModel& scene, int source_index,
                           const Vec3& source_position,
                           const Vec3& listener_position,
                           const ReferenceConfig& config, const Rng& rng);

// Per band, per ACN channel (order 1) signed response.
using ShResponse =
    std::array<std::array<std::vector<double>, kReverbShChannels>, kNumBands>;

// Turns the energy histogram into signed responses. Deterministic taps carry
// sqrt of their energy; the remaining energy, smoothed over `smoothing`
// seconds, modulates Poisson-arrival noise whose density follows
// 4 pi c^3 t^2 / V, with V taken from the mean free path as a cube of edge
// 1.5 * mfp. The carrier has unit expected power per sample, so the
// expected energy of every bin is preserved. Each part is encoded with its
// own order-1 directivity.
ShResponse BuildShResponse(const FullRateIR& ir, double speed_of_sound,
                           const Rng& rng, double smoothing = 1e-3);

// Omni pressure of a response: the W channel divided by Y00.
std::vector<double> OmniPressure(const ShResponse& response, int band);

// Splits `signal` with the render crossover, convolves each band with its
// response and sums bands per channel. Returns frames x `out_channels`
// (frame-major) of length signal + response - 1; channels above order 1
// stay zero.
std::vector<double> ConvolveRender(std::span<const double> signal,
                                   double sample_rate,
                                   const ShResponse& response,
                                   int out_channels);

}  // namespace echoforge

#endif  // ECHOFORGE_REFERENCE_H_
