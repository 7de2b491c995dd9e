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

#include "echoforge/ir_analysis.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>


namespace echoforge {
namespace {

SHVector Isotropic() {
  SHVector v(1);
  v[0] = EvalSH(Vec3::UnitZ(), 0)[0];
  return v;
}

bool IsPrime(int n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (int d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

// Fallback comb center when no reflections have been seen yet.
constexpr double kFallbackCombCenter = 0.02;

}  // namespace

std::vector<double> EnergyDecayCurveDb(std::span<const double> ir) {
  int last = -1;
  for (int k = static_cast<int>(ir.size()) - 1; k >= 0; --k) {
    if (ir[k] > 0.0) {
      last = k;
      break;
    }
  }
  if (last < 0) return {};
  std::vector<double> edc(last + 1);
  double sum = 0.0;
  for (int k = last; k >= 0; --k) {
    sum += std::max(ir[k], 0.0);
    edc[k] = sum;
  }
  const double total = edc[0];
  for (double& v : edc) v = 10.0 * std::log10(v / total);
  return edc;
}

std::optional<double> EstimateRt60(std::span<const double> ir,
                                   double sample_rate, double max_rt) {
  int nonzero = 0;
  for (double v : ir) nonzero += v > 0.0;
  if (nonzero < 3) return std::nullopt;
  const std::vector<double> edc = EnergyDecayCurveDb(ir);
  const double floor_db = *std::min_element(edc.begin(), edc.end());

  auto fit = [&](double hi, double lo) -> std::optional<double> {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t k = 0; k < edc.size(); ++k) {
      if (edc[k] > hi || edc[k] < lo) continue;
      const double t = k / sample_rate;
      sx += t;
      sy += edc[k];
      sxx += t * t;
      sxy += t * edc[k];
      ++n;
    }
    if (n < 2) return std::nullopt;
    const double den = n * sxx - sx * sx;
    if (den <= 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / den;
  };

  std::optional<double> slope;
  if (floor_db <= -35.0) {
    slope = fit(-5.0, -35.0);
  } else if (floor_db <= -25.0) {
    slope = fit(-5.0, -25.0);
  }
  if (!slope) slope = fit(-5.0, floor_db);
  if (!slope) slope = fit(0.0, floor_db);
  if (!slope || !(*slope < 0.0)) return std::nullopt;
  return std::clamp(-60.0 / *slope, 0.05, max_rt);
}

double SmoothParameter(double new_value, double cached, double tau,
                       double dt) {
  const double alpha = SmoothingAlpha(tau, dt);
  return alpha * new_value + (1.0 - alpha) * cached;
}

double ReverbEnergyIntegral(double rt60) {
  return rt60 / (6.0 * std::log(10.0));
}

double ReverbGain(double total_intensity, double rt60) {
  if (!(rt60 > 0.0)) throw std::invalid_argument("rt60 must be positive");
  if (total_intensity <= 0.0) return 0.0;
  return std::sqrt(total_intensity / ReverbEnergyIntegral(rt60));
}

std::optional<double> EstimatePredelay(const LowRateIR& ir) {
  int first = ir.length();
  for (int b = 0; b < kNumBands; ++b) {
    for (int k = 0; k < first; ++k) {
      if (ir.intensity(b, k) > 0.0) {
        first = k;
        break;
      }
    }
  }
  if (first == ir.length()) return std::nullopt;
  return first / ir.sample_rate();
}

std::optional<SHVector> AverageDirectivity(const LowRateIR& ir, int band) {
  double total = 0.0;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (int k = 0; k < ir.length(); ++k) {
    total += ir.intensity(band, k);
    sum += ir.weighted_directivity(band, k);
  }
  if (total <= 0.0) return std::nullopt;
  SHVector out(1);
  out.coeffs() = sum / total;
  return out;
}

std::vector<SHVector> CombInputDirectivities(const LowRateIR& ir,
                                             std::span<const double> delays) {
  std::vector<SHVector> out(delays.size(), Isotropic());
  const std::optional<double> predelay = EstimatePredelay(ir);
  if (!predelay) return out;

  double total = 0.0;
  Eigen::Vector4d total_w = Eigen::Vector4d::Zero();
  for (int b = 0; b < kNumBands; ++b) {
    for (int k = 0; k < ir.length(); ++k) {
      total += ir.intensity(b, k);
      total_w += ir.weighted_directivity(b, k);
    }
  }
  SHVector average(1);
  average.coeffs() = total_w / total;

  auto broadband = [&](int k, double& i, Eigen::Vector4d& w) {
    i = 0.0;
    w.setZero();
    for (int b = 0; b < kNumBands; ++b) {
      i += ir.intensity(b, k);
      w += ir.weighted_directivity(b, k);
    }
  };
  for (size_t c = 0; c < delays.size(); ++c) {
    const double pos = (*predelay + delays[c]) * ir.sample_rate();
    const int k0 = static_cast<int>(std::floor(pos + 1e-9));
    if (k0 >= ir.length()) {
      out[c] = average;
      continue;
    }
    const double frac = std::max(0.0, pos - k0);
    double i0, i1 = 0.0;
    Eigen::Vector4d w0, w1 = Eigen::Vector4d::Zero();
    broadband(k0, i0, w0);
    if (frac > 1e-9 && k0 + 1 < ir.length()) broadband(k0 + 1, i1, w1);
    const double i = (1.0 - frac) * i0 + frac * i1;
    if (i <= 0.0) {
      out[c] = average;
      continue;
    }
    out[c].coeffs() = ((1.0 - frac) * w0 + frac * w1) / i;
  }
  return out;
}

int NextPrime(int n) {
  if (n <= 2) return 2;
  while (!IsPrime(n)) ++n;
  return n;
}

CombDelaySet CombDelayTimes(double mean_free_path, double speed_of_sound,
                            int num_combs, double render_rate, Rng& rng,
                            const CombDelaySet* previous) {
  if (!(mean_free_path > 0.0) || !(speed_of_sound > 0.0)) {
    throw std::invalid_argument("mean free path and c must be positive");
  }
  const double center = mean_free_path / speed_of_sound;
  if (previous != nullptr && !previous->samples.empty()) {
    const double sigma_prev = previous->center / 3.0;
    if (std::abs(center - previous->center) <= 2.0 * sigma_prev) {
      return *previous;
    }
  }
  CombDelaySet out;
  out.center = center;
  std::set<int> used;
  for (int i = 0; i < num_combs; ++i) {
    const double draw =
        std::max(rng.Gaussian(center, center / 3.0), kMinCombDelay);
    int samples = NextPrime(
        std::max(2, static_cast<int>(std::lround(draw * render_rate))));
    while (used.count(samples)) samples = NextPrime(samples + 1);
    used.insert(samples);
    out.samples.push_back(samples);
    out.delays.push_back(samples / render_rate);
  }
  return out;
}

ReverbParams IrAnalyzer::Analyze(const LowRateIR& ir, double mean_free_path,
                                 double dt, Rng& rng) {
  ReverbParams p;
  const ReverbParams* prev = previous_ ? &*previous_ : nullptr;
  for (int b = 0; b < kNumBands; ++b) {
    const double total = ir.TotalIntensity(b);
    p.total_intensity[b] = total;
    const std::optional<double> rt =
        EstimateRt60(ir.band(b), ir.sample_rate(), config_.max_rt);
    const std::optional<SHVector> avg = AverageDirectivity(ir, b);
    if (!rt || total <= 0.0 || !avg) {
      p.band_silent[b] = true;
      p.rt60[b] = prev ? prev->rt60[b] : 1.0;
      p.reverb_gain[b] = prev ? prev->reverb_gain[b] : 0.0;
      p.avg_directivity[b] = prev ? prev->avg_directivity[b] : Isotropic();
      continue;
    }
    p.band_silent[b] = false;
    const double gain = ReverbGain(total, *rt);
    if (prev && !prev->band_silent[b]) {
      p.rt60[b] = SmoothParameter(*rt, prev->rt60[b], config_.tau_lr, dt);
      p.reverb_gain[b] =
          SmoothParameter(gain, prev->reverb_gain[b], config_.tau_lr, dt);
    } else {
      p.rt60[b] = *rt;
      p.reverb_gain[b] = gain;
    }
    p.avg_directivity[b] = *avg;
  }
  p.silent = std::all_of(p.band_silent.begin(), p.band_silent.end(),
                         [](bool s) { return s; });

  const std::optional<double> predelay = EstimatePredelay(ir);
  p.predelay = predelay ? *predelay : (prev ? prev->predelay : 0.0);

  p.mean_free_path = mean_free_path > 0.0
                         ? mean_free_path
                         : (prev ? prev->mean_free_path : 0.0);
  if (p.mean_free_path > 0.0) {
    delays_ = CombDelayTimes(p.mean_free_path, config_.speed_of_sound,
                             config_.num_combs, config_.render_rate, rng,
                             delays_ ? &*delays_ : nullptr);
  } else if (!delays_) {
    delays_ = CombDelayTimes(kFallbackCombCenter * config_.speed_of_sound,
                             config_.speed_of_sound, config_.num_combs,
                             config_.render_rate, rng);
  }
  p.comb_delay_center = delays_->center;
  p.comb_delays = delays_->delays;
  p.comb_delay_samples = delays_->samples;
  p.comb_input_directivity = CombInputDirectivities(ir, p.comb_delays);

  previous_ = p;
  return p;
}

}  // namespace echoforge
