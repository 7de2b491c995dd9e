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

#include "echoforge/propagation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace echoforge {

LowRateIR::LowRateIR(int length, double sample_rate)
    : sample_rate_(sample_rate), length_(length) {
  if (length < 0 || !(sample_rate > 0.0)) {
    throw std::invalid_argument("invalid low-rate IR shape");
  }
  for (int b = 0; b < kNumBands; ++b) {
    intensity_[b].assign(length, 0.0);
    weighted_[b].assign(length, Eigen::Vector4d::Zero());
  }
}

SHVector LowRateIR::Directivity(int band, int bin) const {
  SHVector out(1);
  const double i = intensity_[band][bin];
  if (i > 0.0) out.coeffs() = weighted_[band][bin] / i;
  return out;
}

bool LowRateIR::Add(double time, const BandArray& energy,
                    const Vec3& direction) {
  return Add(time, energy, EvalSH(direction, 1));
}

bool LowRateIR::Add(double time, const BandArray& energy,
                    const SHVector& directivity) {
  const double pos = std::floor(time * sample_rate_);
  if (!(pos >= 0.0) || pos >= length_) {
    ++dropped_late_;
    return false;
  }
  const int bin = static_cast<int>(pos);
  const Eigen::Vector4d dir = directivity.Resized(1).coeffs();
  for (int b = 0; b < kNumBands; ++b) {
    intensity_[b][bin] += energy[b];
    weighted_[b][bin] += energy[b] * dir;
  }
  return true;
}

double LowRateIR::TotalIntensity(int band) const {
  double sum = 0.0;
  for (double v : intensity_[band]) sum += v;
  return sum;
}

bool LowRateIR::IsSilent() const {
  for (int b = 0; b < kNumBands; ++b) {
    for (double v : intensity_[b]) {
      if (v > 0.0) return false;
    }
  }
  return true;
}

void LowRateIR::Extend(int length) {
  if (length <= length_) return;
  for (int b = 0; b < kNumBands; ++b) {
    intensity_[b].resize(length, 0.0);
    weighted_[b].resize(length, Eigen::Vector4d::Zero());
  }
  length_ = length;
}

double SmoothingAlpha(double tau, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (tau <= 0.0) return 1.0;
  return 1.0 - std::exp(-dt / tau);
}

LowRateIR AccumulateIr(const LowRateIR& cache, const LowRateIR& frame,
                       double tau, double dt) {
  if (cache.length() > 0 && frame.length() > 0 &&
      std::abs(cache.sample_rate() - frame.sample_rate()) > 1e-9) {
    throw std::invalid_argument("IR sample rates differ");
  }
  const double alpha = SmoothingAlpha(tau, dt);
  const double rate =
      frame.length() > 0 ? frame.sample_rate() : cache.sample_rate();
  LowRateIR out(std::max(cache.length(), frame.length()), rate);
  for (int b = 0; b < kNumBands; ++b) {
    for (int t = 0; t < out.length(); ++t) {
      double i = 0.0;
      Eigen::Vector4d w = Eigen::Vector4d::Zero();
      if (t < frame.length()) {
        i += alpha * frame.intensity(b, t);
        w += alpha * frame.weighted_directivity(b, t);
      }
      if (t < cache.length()) {
        i += (1.0 - alpha) * cache.intensity(b, t);
        w += (1.0 - alpha) * cache.weighted_directivity(b, t);
      }
      out.intensity(b, t) = i;
      out.weighted_directivity(b, t) = w;
    }
  }
  return out;
}

double PathEntry::Intensity() const {
  double sum = 0.0;
  for (double p : pressure) sum += p * p;
  return sum;
}

PathEntry ComputeDirectSound(const SceneModel& scene, const Vec3& source,
                             double radius, double gain, int source_index,
                             const Vec3& listener, Rng& rng, int samples) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  PathEntry entry;
  entry.kind = PathKind::kDirect;
  entry.key.source = source_index;
  entry.key.order = 0;
  entry.directivity = SHVector(kDirectShOrder);
  const Vec3 to = source - listener;
  const double d = to.norm();
  entry.delay = d / scene.speed_of_sound();
  if (d < 1e-9) {
    // Listener at the source: unit-distance intensity, no direction.
    entry.pressure = FilledBands(std::sqrt(gain));
    entry.directivity[0] = EvalSH(Vec3::UnitZ(), 0)[0];
    return entry;
  }
  const Vec3 center = to / d;

  if (radius <= 0.0 || radius >= d) {
    if (radius <= 0.0 && scene.Occluded(listener, source)) return entry;
    entry.pressure = FilledBands(std::sqrt(gain / (d * d)));
    entry.directivity = EvalSH(center, kDirectShOrder);
    if (radius >= d) {
      // Inside the source sphere: energy arrives from everywhere.
      entry.directivity = SHVector(kDirectShOrder);
      entry.directivity[0] = EvalSH(center, 0)[0];
    }
    return entry;
  }

  const double cos_max = std::sqrt(1.0 - (radius / d) * (radius / d));
  const Vec3 t = (std::abs(center.x()) > 0.9 ? Vec3::UnitY() : Vec3::UnitX())
                     .cross(center)
                     .normalized();
  const Vec3 b = center.cross(t);
  std::vector<double> y(ShCount(kDirectShOrder));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(ShCount(kDirectShOrder));
  int visible = 0;
  for (int i = 0; i < samples; ++i) {
    const double cos_t = 1.0 - rng.Uniform() * (1.0 - cos_max);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * kPi * rng.Uniform();
    const Vec3 w = (cos_t * center + sin_t * std::cos(phi) * t +
                    sin_t * std::sin(phi) * b)
                       .normalized();
    // Nearest point of the source surface along w.
    const double proj = w.dot(to);
    const double hit =
        proj - std::sqrt(std::max(0.0, radius * radius - (d * d - proj * proj)));
    if (scene.Occluded(listener, listener + hit * w)) continue;
    ++visible;
    EvalSHInto(w, kDirectShOrder, y);
    for (int k = 0; k < static_cast<int>(y.size()); ++k) sum[k] += y[k];
  }
  if (visible == 0) return entry;
  entry.directivity.coeffs() = sum / visible;
  const double fraction = static_cast<double>(visible) / samples;
  entry.pressure = FilledBands(std::sqrt(gain * fraction / (d * d)));
  return entry;
}

void EarlyAccumulator::Add(double time, const BandArray& e,
                           const Vec3& direction) {
  double broadband = 0.0;
  for (int b = 0; b < kNumBands; ++b) {
    energy[b] += e[b];
    broadband += e[b];
  }
  weight += broadband;
  weighted_time += broadband * time;
  weighted_sh += broadband * EvalSH(direction, kEarlyShOrder).coeffs();
}

void EarlyAccumulator::Blend(const EarlyAccumulator& frame, double alpha) {
  for (int b = 0; b < kNumBands; ++b) {
    energy[b] = alpha * frame.energy[b] + (1.0 - alpha) * energy[b];
  }
  weight = alpha * frame.weight + (1.0 - alpha) * weight;
  weighted_time = alpha * frame.weighted_time + (1.0 - alpha) * weighted_time;
  weighted_sh = alpha * frame.weighted_sh + (1.0 - alpha) * weighted_sh;
}

PathEntry EarlyAccumulator::ToPath(const PathKey& key) const {
  PathEntry p;
  p.key = key;
  p.kind = PathKind::kEarlyReflection;
  p.directivity = SHVector(kEarlyShOrder);
  if (weight <= 0.0) return p;
  p.delay = weighted_time / weight;
  for (int b = 0; b < kNumBands; ++b) {
    p.pressure[b] = std::sqrt(std::max(0.0, energy[b]));
  }
  p.directivity.coeffs() = weighted_sh / weight;
  return p;
}

void CoherenceCaches::Update(const EarlyPathMap& frame_paths,
                             const LowRateIR& frame_ir, double dt) {
  if (frames_ == 0) {
    entries_.clear();
    for (const auto& [key, acc] : frame_paths) entries_[key] = {acc, 0.0};
    ir_ = frame_ir;
  } else {
    const double alpha = SmoothingAlpha(tau_er_, dt);
    const EarlyAccumulator zero;
    for (auto it = entries_.begin(); it != entries_.end();) {
      auto found = frame_paths.find(it->first);
      if (found != frame_paths.end()) {
        it->second.value.Blend(found->second, alpha);
        it->second.age_since_refresh = 0.0;
      } else {
        it->second.value.Blend(zero, alpha);
        it->second.age_since_refresh += dt;
      }
      if (it->second.age_since_refresh > 2.0 * tau_er_) {
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
    for (const auto& [key, acc] : frame_paths) {
      if (entries_.count(key)) continue;
      Entry e{zero, 0.0};
      e.value.Blend(acc, alpha);
      entries_[key] = e;
    }
    ir_ = AccumulateIr(ir_, frame_ir, tau_lr_, dt);
  }
  early_.clear();
  for (const auto& [key, e] : entries_) early_[key] = e.value;
  ++frames_;
}

PathList CoherenceCaches::EarlyPaths() const {
  PathList out;
  out.reserve(early_.size());
  for (const auto& [key, acc] : early_) {
    if (acc.weight > 0.0) out.push_back(acc.ToPath(key));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PathEntry& a, const PathEntry& b) {
                     return a.Intensity() > b.Intensity();
                   });
  return out;
}

FrameTrace TraceFrame(const SceneModel& scene, const Vec3& listener,
                      std::span<const Vec3> source_positions,
                      const PropagationConfig& config, const Rng& rng) {
  const auto& sources = scene.sources();
  if (source_positions.size() != sources.size()) {
    throw std::invalid_argument("one position per scene source required");
  }
  std::vector<double> gains;
  for (const Source& s : sources) gains.push_back(s.gain);

  const int ir_length =
      static_cast<int>(std::ceil(config.max_rt * config.ir_rate));
  FrameTrace frame;
  frame.sources.resize(sources.size());
  for (size_t s = 0; s < sources.size(); ++s) {
    frame.sources[s].ir = LowRateIR(ir_length, config.ir_rate);
    Rng direct_rng = rng.Derive(0xd17ec7ULL + s);
    frame.sources[s].direct = ComputeDirectSound(
        scene, source_positions[s], sources[s].radius, sources[s].gain,
        static_cast<int>(s), listener, direct_rng, config.direct_samples);
  }
  if (scene.free_field()) {
    frame.stats.open_field = true;
    return frame;
  }

  const TraceResult traced = TraceRays(scene, listener, source_positions,
                                       gains, config.tracer, rng.Derive(1));
  frame.stats = traced.stats;
  for (const Arrival& a : traced.arrivals) {
    SourceFrame& sf = frame.sources[a.key.source];
    if (a.key.order <= 2) {
      sf.early[a.key].Add(a.time, a.energy, a.direction);
    } else {
      sf.ir.Add(a.time, a.energy, a.direction);
    }
  }
  for (const PathKey& key : traced.specular_candidates) {
    const int s = key.source;
    const std::optional<SpecularPath> path =
        ValidateSpecularPath(scene, listener, source_positions[s],
                             sources[s].gain, key, config.tracer);
    if (!path) continue;
    frame.sources[s].early[key].Add(path->length / scene.speed_of_sound(),
                                    path->energy, path->direction);
  }
  return frame;
}

Propagator::Propagator(const SceneModel& scene, PropagationConfig config)
    : scene_(scene), config_(std::move(config)) {
  caches_.assign(scene.sources().size(),
                 CoherenceCaches(config_.tau_er, config_.tau_lr));
}

std::vector<PropagationOutput> Propagator::Step(
    const Vec3& listener, std::span<const Vec3> source_positions, double dt,
    const Rng& rng) {
  FrameTrace frame =
      TraceFrame(scene_, listener, source_positions, config_, rng);
  last_stats_ = frame.stats;
  std::vector<PropagationOutput> out(frame.sources.size());
  for (size_t s = 0; s < frame.sources.size(); ++s) {
    caches_[s].Update(frame.sources[s].early, frame.sources[s].ir, dt);
    out[s].direct = frame.sources[s].direct;
    out[s].early = caches_[s].EarlyPaths();
    out[s].ir = caches_[s].ir();
  }
  return out;
}

}  // namespace echoforge
