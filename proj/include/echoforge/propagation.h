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

#ifndef ECHOFORGE_PROPAGATION_H_
#define ECHOFORGE_PROPAGATION_H_

#include <array>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "echoforge/ray_tracer.h"
#include "echoforge/rng.h"
#include "echoforge/scene.h"
#include "echoforge/sh.h"
#include "echoforge/types.h"

namespace echoforge {

inline constexpr double kDefaultIrRate = 100.0;
inline constexpr double kDefaultMaxRt = 8.0;

// Low-rate energy impulse response. Each bin holds the intensity gain
// (energy) arriving during that bin, per band, together with the
// intensity-weighted first order SH projection of the arrival directions.
// Keeping the weighted sum rather than the normalized directivity makes
// temporal smoothing a plain linear blend.
class LowRateIR {
 public:
  LowRateIR() = default;
  LowRateIR(int length, double sample_rate);

  double sample_rate() const { return sample_rate_; }
  int length() const { return length_; }
  double duration() const { return length_ / sample_rate_; }

  double intensity(int band, int bin) const { return intensity_[band][bin]; }
  double& intensity(int band, int bin) { return intensity_[band][bin]; }
  const std::vector<double>& band(int b) const { return intensity_[b]; }

  const Eigen::Vector4d& weighted_directivity(int band, int bin) const {
    return weighted_[band][bin];
  }
  Eigen::Vector4d& weighted_directivity(int band, int bin) {
    return weighted_[band][bin];
  }

  // Normalized order-1 directivity of a bin; zero where the bin is empty.
  SHVector Directivity(int band, int bin) const;

  // Adds energy arriving from `direction` at `time`. Returns false (and adds
  // nothing) if the time is past the end of the buffer.
  bool Add(double time, const BandArray& energy, const Vec3& direction);
  // Same with an explicit first-order directivity (weights sum to energy).
  bool Add(double time, const BandArray& energy, const SHVector& directivity);

  double TotalIntensity(int band) const;
  bool IsSilent() const;

  // Zero-extends to `length` bins (never truncates).
  void Extend(int length);

  int dropped_late() const { return dropped_late_; }

 private:
  double sample_rate_ = kDefaultIrRate;
  int length_ = 0;
  std::array<std::vector<double>, kNumBands> intensity_;
  std::array<std::vector<Eigen::Vector4d>, kNumBands> weighted_;
  int dropped_late_ = 0;
};

// out = alpha * frame + (1 - alpha) * cache with alpha = 1 - exp(-dt/tau).
// A shorter IR is zero-extended first.
LowRateIR AccumulateIr(const LowRateIR& cache, const LowRateIR& frame,
                       double tau, double dt);

// Smoothing factor for a time constant and update interval.
double SmoothingAlpha(double tau, double dt);

enum class PathKind { kDirect, kEarlyReflection };

// A direct or early-reflection path. `directivity` is unit-normalized: for a
// single arrival direction d it equals eval_sh(d); the per-band magnitude is
// carried separately in `pressure`.
struct PathEntry {
  PathKey key;
  PathKind kind = PathKind::kEarlyReflection;
  double delay = 0.0;
  BandArray pressure = FilledBands(0.0);
  SHVector directivity;

  double Intensity() const;
};

using PathList = std::vector<PathEntry>;

inline constexpr int kDirectShOrder = 3;
inline constexpr int kEarlyShOrder = 2;
inline constexpr int kReverbShOrder = 1;

// Direct sound by Monte Carlo visibility sampling over the source sphere.
// A point source uses a single visibility ray.
PathEntry ComputeDirectSound(const SceneModel& scene, const Vec3& source,
                             double radius, double gain, int source_index,
                             const Vec3& listener, Rng& rng, int samples);

// Energy-weighted accumulation of one early path family within a frame.
struct EarlyAccumulator {
  BandArray energy = FilledBands(0.0);
  double weight = 0.0;       // broadband energy
  double weighted_time = 0.0;
  Eigen::VectorXd weighted_sh = Eigen::VectorXd::Zero(ShCount(kEarlyShOrder));

  void Add(double time, const BandArray& e, const Vec3& direction);
  void Blend(const EarlyAccumulator& frame, double alpha);
  PathEntry ToPath(const PathKey& key) const;
};

using EarlyPathMap = std::map<PathKey, EarlyAccumulator>;

// Temporal coherence caches for one source.
class CoherenceCaches {
 public:
  CoherenceCaches(double tau_er = 1.0, double tau_lr = 3.0)
      : tau_er_(tau_er), tau_lr_(tau_lr) {}

  // Blends in one frame. The first frame initializes the caches directly;
  // afterwards new path families enter with weight alpha and families that
  // are not refreshed for 2 * tau_er are removed.
  void Update(const EarlyPathMap& frame_paths, const LowRateIR& frame_ir,
              double dt);

  PathList EarlyPaths() const;
  const LowRateIR& ir() const { return ir_; }
  const EarlyPathMap& early() const { return early_; }
  bool empty() const { return frames_ == 0; }
  double tau_er() const { return tau_er_; }
  double tau_lr() const { return tau_lr_; }

 private:
  struct Entry {
    EarlyAccumulator value;
    double age_since_refresh = 0.0;
  };
  double tau_er_;
  double tau_lr_;
  std::map<PathKey, Entry> entries_;
  EarlyPathMap early_;
  LowRateIR ir_;
  int frames_ = 0;
};

struct PropagationConfig {
  TracerConfig tracer;
  double ir_rate = kDefaultIrRate;
  double max_rt = kDefaultMaxRt;
  int direct_samples = 256;
  double tau_er = 1.0;
  double tau_lr = 3.0;
};

// Raw (unsmoothed) result of one frame for one source.
struct SourceFrame {
  PathEntry direct;
  EarlyPathMap early;
  LowRateIR ir;
};

struct FrameTrace {
  std::vector<SourceFrame> sources;
  TraceStats stats;
};

// Traces all sources for one listener position. Order <= 2 arrivals are
// grouped by path family; higher orders are splatted into the low-rate IR.
FrameTrace TraceFrame(const SceneModel& scene, const Vec3& listener,
                      std::span<const Vec3> source_positions,
                      const PropagationConfig& config, const Rng& rng);

// Per-source output of a propagation update after temporal smoothing.
struct PropagationOutput {
  PathEntry direct;
  PathList early;   // sorted by decreasing intensity
  LowRateIR ir;
};

// Owns the coherence caches for every source and runs one update per call.
class Propagator {
 public:
  Propagator(const SceneModel& scene, PropagationConfig config);

  std::vector<PropagationOutput> Step(const Vec3& listener,
                                      std::span<const Vec3> source_positions,
                                      double dt, const Rng& rng);

  const TraceStats& last_stats() const { return last_stats_; }
  const PropagationConfig& config() const { return config_; }

 private:
  const SceneModel& scene_;
  PropagationConfig config_;
  std::vector<CoherenceCaches> caches_;
  TraceStats last_stats_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_PROPAGATION_H_
