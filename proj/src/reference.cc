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

#include "echoforge/reference.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>

#include <fftw3.h>

#include "echoforge/crossover.h"
#include "echoforge/sh.h"

namespace echoforge {
namespace {

constexpr double kY00 = 0.28209479177387814;

// Centered moving sum normalized by the window, so totals are preserved
// away from the edges.
std::vector<double> BoxSmooth(const std::vector<double>& x, int width) {
  if (width <= 1) return x;
  const int n = static_cast<int>(x.size());
  const int half = width / 2;
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n, i - half + width);
    out[i] = (prefix[hi] - prefix[lo]) / width;
  }
  return out;
}

int Occupied(const LowRateIR& ir) {
  int last = 0;
  for (int b = 0; b < kNumBands; ++b) {
    for (int k = ir.length() - 1; k >= last; --k) {
      if (ir.intensity(b, k) > 0.0) {
        last = k + 1;
        break;
      }
    }
  }
  return last;
}

int PoissonDraw(double mean, Rng& rng) {
  const double limit = std::exp(-mean);
  double p = rng.Uniform();
  int k = 0;
  while (p > limit) {
    p *= rng.Uniform();
    ++k;
  }
  return k;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwDeleter>;

}  // namespace

std::vector<double> FullRateIR::Envelope(int band) const {
  std::vector<double> env(histogram.length());
  for (int k = 0; k < histogram.length(); ++k) {
    env[k] = std::sqrt(histogram.intensity(band, k));
  }
  return env;
}

FullRateIR BuildFullRateIR(const SceneModel& scene, int source_index,
                           const Vec3& source_position,
                           const Vec3& listener_position,
                           const ReferenceConfig& config, const Rng& rng) {
  if (config.rays < 1) throw std::invalid_argument("rays must be >= 1");
  const Source& source = scene.sources().at(source_index);
  const int length =
      static_cast<int>(std::ceil(config.max_rt * config.sample_rate));
  FullRateIR out;
  out.histogram = LowRateIR(length, config.sample_rate);
  out.specular = LowRateIR(length, config.sample_rate);
  out.reference_intensity = source.gain / 100.0;

  Rng direct_rng = rng.Derive(0xd17ec7ULL + source_index);
  const PathEntry direct =
      ComputeDirectSound(scene, source_position, source.radius, source.gain,
                         source_index, listener_position, direct_rng,
                         config.direct_samples);
  BandArray direct_energy;
  for (int b = 0; b < kNumBands; ++b) {
    direct_energy[b] = direct.pressure[b] * direct.pressure[b];
  }
  if (direct.Intensity() > 0.0) {
    const SHVector dir = direct.directivity.Resized(1);
    out.histogram.Add(direct.delay, direct_energy, dir);
    out.specular.Add(direct.delay, direct_energy, dir);
  }

  if (!scene.free_field()) {
    TracerConfig tc;
    tc.primary_rays = config.rays;
    tc.max_order = config.max_order;
    tc.threads = config.threads;
    const Vec3 positions[] = {source_position};
    const double gains[] = {source.gain};
    const TraceResult traced = TraceRays(scene, listener_position, positions,
                                         gains, tc, rng.Derive(1));
    out.mean_free_path = traced.stats.mean_free_path;
    for (const Arrival& a : traced.arrivals) {
      out.histogram.Add(a.time, a.energy, a.direction);
    }
    for (const PathKey& key : traced.specular_candidates) {
      const std::optional<SpecularPath> path = ValidateSpecularPath(
          scene, listener_position, source_position, source.gain, key, tc);
      if (!path) continue;
      const double t = path->length / scene.speed_of_sound();
      out.histogram.Add(t, path->energy, path->direction);
      out.specular.Add(t, path->energy, path->direction);
    }
  }

  for (int k = 0; k < length && out.direct_index < 0; ++k) {
    for (int b = 0; b < kNumBands; ++b) {
      if (out.histogram.intensity(b, k) > 0.0) {
        out.direct_index = k;
        break;
      }
    }
  }

  // Compare mean intensity early and late in the occupied span.
  const int used = Occupied(out.histogram);
  if (used > 20) {
    double early = 0.0, late = 0.0;
    for (int b = 0; b < kNumBands; ++b) {
      for (int k = used / 10; k < used / 5; ++k) {
        early += out.histogram.intensity(b, k);
      }
      for (int k = used * 4 / 5; k < used * 9 / 10; ++k) {
        late += out.histogram.intensity(b, k);
      }
    }
    out.non_decaying = early > 0.0 && late >= 0.1 * early;
  }
  return out;
}

ShResponse BuildShResponse(const FullRateIR& ir, double speed_of_sound,
                           const Rng& rng, double smoothing) {
  const int length = std::max(Occupied(ir.histogram), 1);
  const double fs = ir.sample_rate();
  const int width = std::max(1, static_cast<int>(std::lround(smoothing * fs)));

  // One carrier for all bands: the echoes are the same physical arrivals.
  std::vector<double> carrier(length);
  Rng carrier_rng = rng.Derive(0xca88ULL);
  const double edge = 1.5 * std::max(ir.mean_free_path, 1e-3);
  const double volume = edge * edge * edge;
  const double c3 = speed_of_sound * speed_of_sound * speed_of_sound;
  for (int k = 0; k < length; ++k) {
    const double t = k / fs;
    const double mean =
        std::max(4.0 * kPi * c3 * t * t / volume / fs, 1.0 / width);
    if (mean >= 16.0) {
      carrier[k] = carrier_rng.Gaussian(0.0, 1.0);
      continue;
    }
    const int count = PoissonDraw(mean, carrier_rng);
    double v = 0.0;
    for (int i = 0; i < count; ++i) {
      v += carrier_rng.Uniform() < 0.5 ? -1.0 : 1.0;
    }
    carrier[k] = v / std::sqrt(mean);
  }

  ShResponse out;
  for (int b = 0; b < kNumBands; ++b) {
    std::vector<double> diffuse(length);
    std::array<std::vector<double>, kReverbShChannels> diffuse_dir;
    for (auto& d : diffuse_dir) d.assign(length, 0.0);
    for (int k = 0; k < length; ++k) {
      const double spec = ir.specular.intensity(b, k);
      diffuse[k] = std::max(ir.histogram.intensity(b, k) - spec, 0.0);
      const Eigen::Vector4d w = ir.histogram.weighted_directivity(b, k) -
                                ir.specular.weighted_directivity(b, k);
      for (int c = 0; c < kReverbShChannels; ++c) diffuse_dir[c][k] = w[c];
    }
    const std::vector<double> smooth = BoxSmooth(diffuse, width);
    for (auto& d : diffuse_dir) d = BoxSmooth(d, width);
    for (int c = 0; c < kReverbShChannels; ++c) {
      std::vector<double>& h = out[b][c];
      h.assign(length, 0.0);
      for (int k = 0; k < length; ++k) {
        const double spec = ir.specular.intensity(b, k);
        if (spec > 0.0) {
          h[k] += std::sqrt(spec) *
                  (ir.specular.weighted_directivity(b, k)[c] / spec);
        }
        if (smooth[k] > 0.0) {
          h[k] += std::sqrt(smooth[k]) * carrier[k] *
                  (diffuse_dir[c][k] / smooth[k]);
        }
      }
    }
  }
  return out;
}

std::vector<double> OmniPressure(const ShResponse& response, int band) {
  std::vector<double> p = response[band][0];
  for (double& v : p) v /= kY00;
  return p;
}

std::vector<double> ConvolveRender(std::span<const double> signal,
                                   double sample_rate,
                                   const ShResponse& response,
                                   int out_channels) {
  if (out_channels < kReverbShChannels) {
    throw std::invalid_argument("need at least four output channels");
  }
  size_t ir_length = 0;
  for (const auto& band : response) {
    for (const auto& h : band) ir_length = std::max(ir_length, h.size());
  }
  if (signal.empty() || ir_length == 0) return {};
  const size_t total = signal.size() + ir_length - 1;
  size_t n = 1;
  while (n < total) n <<= 1;
  const size_t bins = n / 2 + 1;

  std::array<std::vector<double>, kNumBands> bands;
  for (auto& b : bands) b.resize(signal.size());
  CrossoverBank crossover(sample_rate);
  crossover.Process(signal, {bands[0], bands[1], bands[2], bands[3]});

  RealBuf real(fftw_alloc_real(n));
  ComplexBuf spectrum(fftw_alloc_complex(bins));
  ComplexBuf band_spectrum(fftw_alloc_complex(bins));
  std::vector<ComplexBuf> acc;
  for (int c = 0; c < kReverbShChannels; ++c) {
    acc.emplace_back(fftw_alloc_complex(bins));
    std::fill_n(&acc.back()[0][0], 2 * bins, 0.0);
  }
  const fftw_plan forward = fftw_plan_dft_r2c_1d(
      static_cast<int>(n), real.get(), spectrum.get(), FFTW_ESTIMATE);
  const fftw_plan forward_band = fftw_plan_dft_r2c_1d(
      static_cast<int>(n), real.get(), band_spectrum.get(), FFTW_ESTIMATE);
  const fftw_plan inverse = fftw_plan_dft_c2r_1d(
      static_cast<int>(n), spectrum.get(), real.get(), FFTW_ESTIMATE);

  for (int b = 0; b < kNumBands; ++b) {
    std::fill_n(real.get(), n, 0.0);
    std::copy(bands[b].begin(), bands[b].end(), real.get());
    fftw_execute(forward_band);
    for (int c = 0; c < kReverbShChannels; ++c) {
      const std::vector<double>& h = response[b][c];
      std::fill_n(real.get(), n, 0.0);
      std::copy(h.begin(), h.end(), real.get());
      fftw_execute(forward);
      for (size_t k = 0; k < bins; ++k) {
        const std::complex<double> x(band_spectrum[k][0], band_spectrum[k][1]);
        const std::complex<double> y(spectrum[k][0], spectrum[k][1]);
        const std::complex<double> z = x * y;
        acc[c][k][0] += z.real();
        acc[c][k][1] += z.imag();
      }
    }
  }
  std::vector<double> out(total * out_channels, 0.0);
  for (int c = 0; c < kReverbShChannels; ++c) {
    std::copy_n(&acc[c][0][0], 2 * bins, &spectrum[0][0]);
    fftw_execute(inverse);
    for (size_t i = 0; i < total; ++i) {
      out[i * out_channels + c] = real[i] / static_cast<double>(n);
    }
  }
  fftw_destroy_plan(forward);
  fftw_destroy_plan(forward_band);
  fftw_destroy_plan(inverse);
  return out;
}

}  // namespace echoforge
