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

#include "echoforge/renderer.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace echoforge {

SourceRenderer::SourceRenderer(const RendererConfig& config,
                               uint64_t reverb_seed)
    : config_(config),
      crossover_(config.sample_rate),
      line_(kNumBands,
            static_cast<int>(std::ceil(config.max_delay * config.sample_rate)) +
                4),
      reverb_([&] {
        ReverbConfig rc;
        rc.sample_rate = config.sample_rate;
        rc.seed = reverb_seed;
        return rc;
      }()) {
  for (auto& b : reverb_in_) b.resize(config.block_size);
  reverb_out_.resize(static_cast<size_t>(config.block_size) * kReverbChannels);
}

void SourceRenderer::Apply(const SourceSnapshot& snapshot) {
  taps_.SetPaths(snapshot.paths, config_.sample_rate, config_.ramp_samples,
                 line_.max_delay());
  const double target =
      std::min(snapshot.reverb.predelay * config_.sample_rate,
               line_.max_delay());
  if (!has_params_) {
    predelay_ = target;
    predelay_remaining_ = 0;
  } else {
    predelay_remaining_ = std::max(config_.ramp_samples, 1);
    predelay_step_ = (target - predelay_) / predelay_remaining_;
  }
  reverb_.SetParams(snapshot.reverb);
  has_params_ = true;
}

void SourceRenderer::Process(std::span<const double> mono,
                             std::span<double> out) {
  const size_t frames = mono.size();
  if (frames > reverb_in_[0].size()) {
    for (auto& b : reverb_in_) b.resize(frames);
    reverb_out_.resize(frames * kReverbChannels);
  }
  std::array<double, kNumBands> bands;
  for (size_t n = 0; n < frames; ++n) {
    crossover_.ProcessSample(mono[n], bands);
    line_.Push(bands);
    if (config_.render_paths) {
      taps_.RenderSample(line_, out.subspan(n * kRenderShChannels,
                                            kRenderShChannels));
    }
    if (predelay_remaining_ > 0) {
      predelay_ += predelay_step_;
      --predelay_remaining_;
    }
    for (int b = 0; b < kNumBands; ++b) {
      reverb_in_[b][n] = line_.Read(b, predelay_);
    }
  }
  if (!config_.render_reverb || !has_params_) return;
  std::array<std::span<const double>, kNumBands> in;
  for (int b = 0; b < kNumBands; ++b) {
    in[b] = std::span<const double>(reverb_in_[b].data(), frames);
  }
  reverb_.Process(in, std::span<double>(reverb_out_.data(),
                                        frames * kReverbChannels));
  // Bands are summed per ACN channel; order 1 fills the first four.
  for (size_t n = 0; n < frames; ++n) {
    const double* r = &reverb_out_[n * kReverbChannels];
    double* o = &out[n * kRenderShChannels];
    for (int b = 0; b < kNumBands; ++b) {
      for (int c = 0; c < kReverbShChannels; ++c) {
        o[c] += r[b * kReverbShChannels + c];
      }
    }
  }
}

AudioRenderer::AudioRenderer(const RendererConfig& config, int num_sources)
    : config_(config) {
  sources_.reserve(num_sources);
  for (int i = 0; i < num_sources; ++i) {
    sources_.emplace_back(config, ReverbSeed(config.seed, i));
  }
}

void AudioRenderer::RenderBlock(
    std::span<const std::span<const double>> inputs, std::span<double> out) {
  if (inputs.size() != sources_.size()) {
    throw std::invalid_argument("one input per source expected");
  }
  if (slot_.Acquire()) {
    const RenderSnapshot& snap = slot_.current();
    for (size_t i = 0; i < sources_.size() && i < snap.sources.size(); ++i) {
      sources_[i].Apply(snap.sources[i]);
    }
    rotation_ = snap.listener_rotation;
    sequence_ = snap.sequence;
  }
  const size_t frames = inputs.empty() ? 0 : inputs[0].size();
  std::fill(out.begin(), out.begin() + frames * kRenderShChannels, 0.0);
  for (size_t i = 0; i < sources_.size(); ++i) {
    sources_[i].Process(inputs[i], out);
  }
}

uint64_t ReverbSeed(uint64_t seed, int index) {
  return MixBits(seed ^ (0x5eed0000ULL + static_cast<uint64_t>(index)));
}

std::array<std::vector<double>, kNumBands> HybridEnergyResponse(
    const SourceSnapshot& snapshot, double sample_rate, int length,
    uint64_t reverb_seed, bool include_paths, bool include_reverb) {
  std::array<std::vector<double>, kNumBands> out;
  for (auto& b : out) b.assign(length, 0.0);
  if (include_paths) {
    for (const PathEntry& p : snapshot.paths) {
      const long k = std::lround(p.delay * sample_rate);
      if (k < 0 || k >= length) continue;
      for (int b = 0; b < kNumBands; ++b) {
        out[b][k] += p.pressure[b] * p.pressure[b];
      }
    }
  }
  if (!include_reverb || snapshot.reverb.silent) return out;
  const long start = std::lround(snapshot.reverb.predelay * sample_rate);
  if (start >= length) return out;
  ReverbConfig rc;
  rc.sample_rate = sample_rate;
  rc.seed = reverb_seed;
  Reverberator reverb(rc);
  reverb.SetParams(snapshot.reverb);
  const int frames = static_cast<int>(length - start);
  std::vector<double> impulse(frames, 0.0);
  impulse[0] = 1.0;
  std::vector<double> response(static_cast<size_t>(frames) * kReverbChannels);
  reverb.Process({impulse, impulse, impulse, impulse}, response);
  const double y00 = EvalSH(Vec3::UnitZ(), 0)[0];
  for (int n = 0; n < frames; ++n) {
    for (int b = 0; b < kNumBands; ++b) {
      const double p = response[static_cast<size_t>(n) * kReverbChannels +
                                b * kReverbShChannels] /
                       y00;
      out[b][start + n] += p * p;
    }
  }
  return out;
}

}  // namespace echoforge
