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

#include "echoforge/simulation.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "echoforge/early_renderer.h"
#include "echoforge/hrtf_io.h"
#include "echoforge/ir_analysis.h"
#include "echoforge/json_io.h"
#include "echoforge/parallel.h"
#include "echoforge/propagation.h"
#include "echoforge/reference.h"
#include "echoforge/renderer.h"
#include "echoforge/spatializer.h"

namespace echoforge {
namespace {

// Binaural or loudspeaker output stage.
class OutputStage {
 public:
  explicit OutputStage(const RenderConfig& config) {
    if (!config.panning.empty()) {
      panning_.emplace(
          MakePanning(LoadSpeakerLayout(config.panning), kRenderShOrder));
    } else {
      binaural_.emplace(
          LoadHrtf(config.hrtf, config.sample_rate, kRenderShOrder));
    }
  }

  int channels() const { return panning_ ? panning_->channels() : 2; }

  void SetListenerRotation(const Mat3& r) {
    if (panning_) panning_->SetListenerRotation(r);
    if (binaural_) binaural_->SetListenerRotation(r);
  }

  void Process(std::span<const double> q, std::span<double> out) {
    if (panning_) panning_->Process(q, kRenderShChannels, out);
    if (binaural_) binaural_->Process(q, kRenderShChannels, out);
  }

 private:
  std::optional<BinauralSpatializer> binaural_;
  std::optional<PanningSpatializer> panning_;
};

struct Poses {
  Vec3 listener;
  Mat3 orientation;
  std::vector<Vec3> sources;
};

Poses PosesAt(const SceneModel& scene, double t) {
  Poses p;
  const Listener& l = scene.listener();
  if (l.trajectory) {
    const Pose pose = l.trajectory->Sample(t);
    p.listener = pose.position;
    p.orientation = pose.orientation.normalized().toRotationMatrix();
  } else {
    p.listener = l.position;
    p.orientation = l.orientation;
  }
  for (const Source& s : scene.sources()) {
    p.sources.push_back(s.trajectory ? s.trajectory->Sample(t).position
                                     : s.position);
  }
  return p;
}

void CheckFinite(std::span<const double> samples, const char* stage,
                 double time) {
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      std::ostringstream msg;
      msg << "non-finite sample in " << stage << " output near t=" << time
          << " s (index " << i << ")";
      throw std::runtime_error(msg.str());
    }
  }
}

int MetricLength(const RenderConfig& config) {
  return static_cast<int>(std::ceil(config.max_rt * config.sample_rate));
}

}  // namespace

RenderMode ParseRenderMode(const std::string& name) {
  if (name == "reverb") return RenderMode::kReverb;
  if (name == "convolution") return RenderMode::kConvolution;
  if (name == "both") return RenderMode::kBoth;
  throw std::invalid_argument("mode must be reverb, convolution or both");
}

void RenderConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("usage error: " + what);
  };
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    fail("--duration must be > 0");
  }
  if (sample_rate != 44100.0 && sample_rate != 48000.0) {
    fail("--sample-rate must be 44100 or 48000");
  }
  if (!(sim_rate >= 1.0)) fail("--sim-rate must be >= 1");
  if (block_size < 1) fail("block size must be >= 1");
  if (rays < 1 || max_order < 1 || oracle_rays < 1) {
    fail("ray counts and reflection order must be >= 1");
  }
  if (!(tau_er > 0.0) || !(tau_lr > 0.0)) fail("time constants must be > 0");
  if (!(max_rt > 0.0)) fail("max_rt must be > 0");
}

RenderResult RunRender(const SceneModel& scene, const RenderConfig& config) {
  config.Validate();
  const int num_sources = static_cast<int>(scene.sources().size());
  const double fs = config.sample_rate;
  const size_t total =
      static_cast<size_t>(std::llround(config.duration * fs));
  const Rng root(config.seed);

  std::vector<std::vector<double>> signals;
  for (int s = 0; s < num_sources; ++s) {
    signals.push_back(LoadSourceSignal(scene.sources()[s].audio, fs, total,
                                       root.Derive(0xa0d10ULL + s).seed()));
  }

  RenderResult result;
  nlohmann::json updates = nlohmann::json::array();
  const bool run_reverb = config.mode != RenderMode::kConvolution;
  const bool run_oracle = config.mode != RenderMode::kReverb;

  nlohmann::json summary;
  if (run_reverb) {
    PropagationConfig pc;
    pc.tracer.primary_rays = config.rays;
    pc.tracer.max_order = config.max_order;
    pc.tracer.threads = config.threads;
    pc.max_rt = config.max_rt;
    pc.tau_er = config.tau_er;
    pc.tau_lr = config.tau_lr;
    Propagator propagator(scene, pc);

    AnalysisConfig ac;
    ac.tau_lr = config.tau_lr;
    ac.max_rt = config.max_rt;
    ac.render_rate = fs;
    ac.speed_of_sound = scene.speed_of_sound();
    std::vector<IrAnalyzer> analyzers(num_sources, IrAnalyzer(ac));

    const double dt = 1.0 / config.sim_rate;
    RendererConfig rc;
    rc.sample_rate = fs;
    rc.block_size = config.block_size;
    rc.ramp_samples = std::max(1, static_cast<int>(std::lround(fs * dt)));
    rc.seed = config.seed;
    AudioRenderer renderer(rc, num_sources);
    OutputStage output(config);

    const int out_channels = output.channels();
    result.reverb_audio.sample_rate = fs;
    result.reverb_audio.channels = out_channels;
    result.reverb_audio.samples.assign(total * out_channels, 0.0);

    RenderSnapshot snapshot;
    uint64_t frame = 0;
    double next_update = 0.0;  // in samples
    std::vector<double> sh(static_cast<size_t>(config.block_size) *
                           kRenderShChannels);
    std::vector<std::span<const double>> inputs(num_sources);
    uint64_t applied_sequence = 0;
    int total_dropped = 0;

    for (size_t start = 0; start < total; start += config.block_size) {
      while (next_update <= static_cast<double>(start)) {
        const double t = next_update / fs;
        const Poses poses = PosesAt(scene, t);
        const Rng frame_rng = root.Derive(frame);
        const std::vector<PropagationOutput> prop =
            propagator.Step(poses.listener, poses.sources, dt,
                            frame_rng.Derive(1));
        std::vector<PathList> lists(num_sources);
        for (int s = 0; s < num_sources; ++s) {
          if (prop[s].direct.Intensity() > 0.0) {
            lists[s].push_back(prop[s].direct);
          }
          lists[s].insert(lists[s].end(), prop[s].early.begin(),
                          prop[s].early.end());
        }
        const EarlySelection selection = SelectEarlyPaths(lists);
        total_dropped += selection.dropped_count;
        const TraceStats& stats = propagator.last_stats();
        snapshot.sequence = frame + 1;
        snapshot.listener_rotation = poses.orientation;
        snapshot.sources.resize(num_sources);
        nlohmann::json entry;
        entry["frame"] = frame;
        entry["time"] = t;
        entry["mean_free_path"] = stats.mean_free_path;
        entry["segments"] = stats.total_segments;
        entry["sources"] = nlohmann::json::array();
        for (int s = 0; s < num_sources; ++s) {
          LowRateIR ir = prop[s].ir;
          InjectPaths(ir, selection.dropped[s]);
          Rng analysis_rng = frame_rng.Derive(2 + s);
          snapshot.sources[s].paths = selection.rendered[s];
          snapshot.sources[s].reverb = analyzers[s].Analyze(
              ir, stats.mean_free_path, dt, analysis_rng);
          nlohmann::json src = ToJson(snapshot.sources[s].reverb);
          src["id"] = scene.sources()[s].id;
          src["rendered_paths"] = selection.rendered[s].size();
          src["dropped_paths"] = selection.dropped[s].size();
          entry["sources"].push_back(std::move(src));
        }
        updates.push_back(std::move(entry));
        renderer.slot().Publish(snapshot);
        ++frame;
        next_update = frame * fs / config.sim_rate;
      }

      const size_t frames =
          std::min<size_t>(config.block_size, total - start);
      for (int s = 0; s < num_sources; ++s) {
        inputs[s] = std::span<const double>(signals[s].data() + start, frames);
      }
      const std::span<double> sh_block(sh.data(), frames * kRenderShChannels);
      renderer.RenderBlock(inputs, sh_block);
      CheckFinite(sh_block, "reverb renderer", start / fs);
      if (renderer.sequence() != applied_sequence) {
        output.SetListenerRotation(renderer.listener_rotation());
        applied_sequence = renderer.sequence();
      }
      const std::span<double> out(
          result.reverb_audio.samples.data() + start * out_channels,
          frames * out_channels);
      output.Process(sh_block, out);
      CheckFinite(out, "spatializer", start / fs);
    }

    nlohmann::json ours_sources = nlohmann::json::array();
    for (int s = 0; s < num_sources; ++s) {
      const BandIntensities hybrid =
          HybridEnergyResponse(snapshot.sources[s], fs, MetricLength(config),
                               ReverbSeed(config.seed, s));
      if (FirstNonZero(hybrid) < 0) {
        ours_sources.push_back(nullptr);
        continue;
      }
      const AcousticMetrics m = ComputeAcousticMetrics(
          hybrid, fs, -1, scene.sources()[s].gain / 100.0, config.max_rt);
      if (s == 0) result.ours = m;
      ours_sources.push_back(ToJson(m));
    }
    result.final_snapshot = snapshot;
    if (result.ours) summary["ours"] = ToJson(*result.ours);
    summary["ours_sources"] = std::move(ours_sources);
    summary["dropped_paths_total"] = total_dropped;
    summary["clamped_delays"] = renderer.source(0).taps().clamped_delays();
  }

  if (run_oracle) {
    const Poses poses = PosesAt(scene, 0.0);
    ReferenceConfig ref;
    ref.rays = config.oracle_rays;
    ref.max_order = config.max_order;
    ref.max_rt = config.max_rt;
    ref.sample_rate = fs;
    ref.threads = config.threads;
    std::vector<double> field(total * kRenderShChannels, 0.0);
    nlohmann::json oracle_sources = nlohmann::json::array();
    for (int s = 0; s < num_sources; ++s) {
      const Rng oracle_rng = root.Derive(0x0AC1E000ULL + s);
      const FullRateIR ir =
          BuildFullRateIR(scene, s, poses.sources[s], poses.listener, ref,
                          oracle_rng);
      const ShResponse response =
          BuildShResponse(ir, scene.speed_of_sound(), oracle_rng.Derive(7));
      const std::vector<double> rendered =
          ConvolveRender(signals[s], fs, response, kRenderShChannels);
      const size_t n = std::min(field.size(), rendered.size());
      for (size_t i = 0; i < n; ++i) field[i] += rendered[i];
      result.oracle_intensity.push_back(HistogramIntensities(ir.histogram));
      result.oracle_direct_index.push_back(ir.direct_index);
      if (ir.direct_index < 0) {
        oracle_sources.push_back(nullptr);
        continue;
      }
      const AcousticMetrics m = ComputeAcousticMetrics(
          HistogramIntensities(ir.histogram), fs, ir.direct_index,
          ir.reference_intensity, config.max_rt);
      if (s == 0) result.oracle = m;
      nlohmann::json j = ToJson(m);
      j["non_decaying"] = ir.non_decaying;
      oracle_sources.push_back(std::move(j));
    }
    CheckFinite(field, "convolution oracle", 0.0);
    OutputStage output(config);
    output.SetListenerRotation(poses.orientation);
    result.oracle_audio.sample_rate = fs;
    result.oracle_audio.channels = output.channels();
    result.oracle_audio.samples.assign(total * output.channels(), 0.0);
    output.Process(field, result.oracle_audio.samples);
    CheckFinite(result.oracle_audio.samples, "oracle spatializer", 0.0);
    if (result.oracle) summary["oracle"] = ToJson(*result.oracle);
    summary["oracle_sources"] = std::move(oracle_sources);
  }

  result.metrics["config"] = {
      {"duration", config.duration},   {"sample_rate", fs},
      {"sim_rate", config.sim_rate},   {"rays", config.rays},
      {"oracle_rays", config.oracle_rays},
      {"max_order", config.max_order}, {"seed", config.seed},
      {"block_size", config.block_size}};
  result.metrics["updates"] = std::move(updates);
  result.metrics["summary"] = std::move(summary);
  return result;
}

}  // namespace echoforge
