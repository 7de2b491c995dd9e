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

#ifndef ECHOFORGE_RENDERER_H_
#define ECHOFORGE_RENDERER_H_

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "echoforge/crossover.h"
#include "echoforge/delay_line.h"
#include "echoforge/early_renderer.h"
#include "echoforge/ir_analysis.h"
#include "echoforge/propagation.h"
#include "echoforge/reverberator.h"
#include "echoforge/rng.h"
#include "echoforge/types.h"

namespace echoforge {

// Single-producer single-consumer latest-value slot (triple buffer). The
// producer copies into its private buffer and swaps it in with one atomic
// exchange; the consumer never blocks and never allocates.
template <typename T>
class SnapshotSlot {
 public:
  void Publish(const T& value) {
    buffers_[back_] = value;
    back_ = middle_.exchange(back_ | kFresh, std::memory_order_acq_rel) & 3;
  }

  // Returns true and switches current() when a newer value is available.
  bool Acquire() {
    if (!(middle_.load(std::memory_order_acquire) & kFresh)) return false;
    front_ = middle_.exchange(front_, std::memory_order_acq_rel) & 3;
    return true;
  }

  const T& current() const { return buffers_[front_]; }

 private:
  static constexpr int kFresh = 4;
  std::array<T, 3> buffers_{};
  int front_ = 0;
  int back_ = 1;
  std::atomic<int> middle_{2};
};

struct SourceSnapshot {
  PathList paths;  // direct sound and early reflections to render
  ReverbParams reverb;
};

struct RenderSnapshot {
  uint64_t sequence = 0;
  std::vector<SourceSnapshot> sources;
  Mat3 listener_rotation = Mat3::Identity();
};

struct RendererConfig {
  double sample_rate = 44100.0;
  int block_size = 256;
  // Samples over which tap delays, gains and directivities glide to a new
  // snapshot. Usually one simulation interval.
  int ramp_samples = 4410;
  double max_delay = 2.0;  // seconds of band audio kept per source
  bool render_paths = true;
  bool render_reverb = true;
  uint64_t seed = 0;
};

// One source: crossover, band delay line, direct/early taps and reverberator.
// Output is broadband SH order 3 (16 channels), frame-major, accumulated.
class SourceRenderer {
 public:
  SourceRenderer(const RendererConfig& config, uint64_t reverb_seed);

  void Apply(const SourceSnapshot& snapshot);

  void Process(std::span<const double> mono, std::span<double> out);

  const TapRenderer& taps() const { return taps_; }
  const Reverberator& reverb() const { return reverb_; }

 private:
  RendererConfig config_;
  CrossoverBank crossover_;
  DelayLine line_;
  TapRenderer taps_;
  Reverberator reverb_;
  double predelay_ = 0.0;       // samples
  double predelay_step_ = 0.0;
  int predelay_remaining_ = 0;
  bool has_params_ = false;
  std::array<std::vector<double>, kNumBands> reverb_in_;
  std::vector<double> reverb_out_;
};

class AudioRenderer {
 public:
  AudioRenderer(const RendererConfig& config, int num_sources);

  SnapshotSlot<RenderSnapshot>& slot() { return slot_; }

  // Picks up the newest snapshot, then renders `frames` samples. `inputs`
  // holds one mono span per source; `out` is frames x 16.
  void RenderBlock(std::span<const std::span<const double>> inputs,
                   std::span<double> out);

  const Mat3& listener_rotation() const { return rotation_; }
  uint64_t sequence() const { return sequence_; }
  const SourceRenderer& source(int i) const { return sources_[i]; }

 private:
  RendererConfig config_;
  std::vector<SourceRenderer> sources_;
  SnapshotSlot<RenderSnapshot> slot_;
  Mat3 rotation_ = Mat3::Identity();
  uint64_t sequence_ = 0;
};

// Seed of the reverberator feedback rotations for source `index`.
uint64_t ReverbSeed(uint64_t seed, int index);

// Energy response of what the renderer plays for one source: direct and
// early taps at their delays plus the omni energy of the reverberator's
// impulse response (started at the predelay). Per band, `length` samples at
// `sample_rate`, bands assumed ideal.
std::array<std::vector<double>, kNumBands> HybridEnergyResponse(
    const SourceSnapshot& snapshot, double sample_rate, int length,
    uint64_t reverb_seed, bool include_paths = true,
    bool include_reverb = true);

}  // namespace echoforge

#endif  // ECHOFORGE_RENDERER_H_
