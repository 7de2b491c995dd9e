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

#ifndef ECHOFORGE_SIMULATION_H_
#define ECHOFORGE_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "echoforge/audio_io.h"
#include "echoforge/acoustic_metrics.h"
#include "echoforge/renderer.h"
#include "echoforge/scene.h"

namespace echoforge {

enum class RenderMode { kReverb, kConvolution, kBoth };

RenderMode ParseRenderMode(const std::string& name);

struct RenderConfig {
  double duration = 10.0;
  double sample_rate = 44100.0;
  int block_size = 256;
  double sim_rate = 10.0;
  int rays = 50;
  int max_order = 200;
  int oracle_rays = 500;
  uint64_t seed = 42;
  RenderMode mode = RenderMode::kBoth;
  std::string hrtf = "builtin:sphere";
  std::string panning;  // speaker layout path; empty selects binaural
  double tau_er = 1.0;
  double tau_lr = 3.0;
  double max_rt = 8.0;
  int threads = 0;  // 0: ECHOFORGE_THREADS or hardware concurrency

  // Throws std::invalid_argument with a usage message.
  void Validate() const;
};

struct RenderResult {
  AudioBuffer reverb_audio;  // empty unless the reverb pipeline ran
  AudioBuffer oracle_audio;  // empty unless the oracle ran
  nlohmann::json metrics;
  // Summary metrics for the first source; set for the pipelines that ran.
  std::optional<AcousticMetrics> ours;
  std::optional<AcousticMetrics> oracle;
  // Last parameter snapshot handed to the renderer.
  RenderSnapshot final_snapshot;
  // Oracle energy histograms per source with their direct-sound bins.
  std::vector<BandIntensities> oracle_intensity;
  std::vector<int> oracle_direct_index;
};

// Offline deterministic run: simulation updates and audio blocks are
// interleaved on one thread in timestamp order. Updates take effect at the
// first block boundary at or after their time.
RenderResult RunRender(const SceneModel& scene, const RenderConfig& config);

}  // namespace echoforge

#endif  // ECHOFORGE_SIMULATION_H_
