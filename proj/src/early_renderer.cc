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

#include "echoforge/early_renderer.h"

#include <algorithm>
#include <tuple>

namespace echoforge {

EarlySelection SelectEarlyPaths(const std::vector<PathList>& per_source,
                                int max_paths, double threshold) {
  EarlySelection sel;
  sel.rendered.resize(per_source.size());
  sel.dropped.resize(per_source.size());
  std::vector<const PathEntry*> candidates;
  for (size_t s = 0; s < per_source.size(); ++s) {
    for (const PathEntry& p : per_source[s]) {
      if (p.kind == PathKind::kDirect) {
        sel.rendered[s].push_back(p);
      } else if (p.Intensity() < threshold) {
        ++sel.below_threshold;
      } else {
        candidates.push_back(&p);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const PathEntry* a, const PathEntry* b) {
              const double ia = a->Intensity();
              const double ib = b->Intensity();
              if (ia != ib) return ia > ib;
              return a->key < b->key;
            });
  for (size_t i = 0; i < candidates.size(); ++i) {
    const PathEntry& p = *candidates[i];
    if (static_cast<int>(i) < max_paths) {
      sel.rendered[p.key.source].push_back(p);
    } else {
      sel.dropped[p.key.source].push_back(p);
      ++sel.dropped_count;
    }
  }
  return sel;
}

void InjectPaths(LowRateIR& ir, std::span<const PathEntry> paths) {
  for (const PathEntry& p : paths) {
    BandArray energy;
    for (int b = 0; b < kNumBands; ++b) energy[b] = p.pressure[b] * p.pressure[b];
    SHVector dir = p.directivity.Resized(1);
    ir.Add(p.delay, energy, dir);
  }
}

void TapRenderer::SetPaths(std::span<const PathEntry> paths,
                           double sample_rate, int ramp_samples,
                           double max_delay_samples) {
  const int ramp = std::max(ramp_samples, 1);
  std::map<PathKey, Tap> next;
  for (const PathEntry& p : paths) {
    double target_delay = p.delay * sample_rate;
    if (target_delay > max_delay_samples) {
      target_delay = max_delay_samples;
      ++clamped_;
    }
    const int channels = std::min(p.directivity.size(), kRenderShChannels);
    std::array<double, kRenderShChannels> coeffs{};
    for (int c = 0; c < channels; ++c) coeffs[c] = p.directivity[c];

    Tap tap;
    auto it = taps_.find(p.key);
    if (it != taps_.end()) {
      tap = it->second;
    } else {
      tap.delay = target_delay;
      tap.pressure = FilledBands(0.0);
      tap.coeffs = coeffs;
    }
    tap.channels = std::max(channels, it != taps_.end() ? tap.channels : 1);
    tap.remaining = ramp;
    tap.fading_out = false;
    tap.delay_step = (target_delay - tap.delay) / ramp;
    for (int b = 0; b < kNumBands; ++b) {
      tap.pressure_step[b] = (p.pressure[b] - tap.pressure[b]) / ramp;
    }
    for (int c = 0; c < kRenderShChannels; ++c) {
      tap.coeffs_step[c] = (coeffs[c] - tap.coeffs[c]) / ramp;
    }
    next[p.key] = tap;
  }
  for (auto& [key, tap] : taps_) {
    if (next.count(key)) continue;
    Tap fade = tap;
    fade.fading_out = true;
    fade.remaining = ramp;
    fade.delay_step = 0.0;
    for (int b = 0; b < kNumBands; ++b) {
      fade.pressure_step[b] = -fade.pressure[b] / ramp;
    }
    fade.coeffs_step.fill(0.0);
    next[key] = fade;
  }
  taps_ = std::move(next);
}

void TapRenderer::RenderSample(const DelayLine& line, std::span<double> out) {
  for (auto it = taps_.begin(); it != taps_.end();) {
    Tap& t = it->second;
    double mono = 0.0;
    for (int b = 0; b < kNumBands; ++b) {
      if (t.pressure[b] != 0.0) mono += t.pressure[b] * line.Read(b, t.delay);
    }
    if (mono != 0.0) {
      for (int c = 0; c < t.channels; ++c) out[c] += mono * t.coeffs[c];
    }
    if (t.remaining > 0) {
      t.delay += t.delay_step;
      for (int b = 0; b < kNumBands; ++b) t.pressure[b] += t.pressure_step[b];
      for (int c = 0; c < t.channels; ++c) t.coeffs[c] += t.coeffs_step[c];
      if (--t.remaining == 0) {
        if (t.fading_out) {
          it = taps_.erase(it);
          continue;
        }
        t.delay_step = 0.0;
        t.pressure_step.fill(0.0);
        t.coeffs_step.fill(0.0);
      }
    }
    ++it;
  }
}

}  // namespace echoforge
