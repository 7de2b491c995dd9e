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

#ifndef ECHOFORGE_AUDIO_IO_H_
#define ECHOFORGE_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace echoforge {

struct AudioBuffer {
  double sample_rate = 44100.0;
  int channels = 1;
  std::vector<double> samples;  // interleaved

  size_t frames() const { return channels > 0 ? samples.size() / channels : 0; }
};

// Reads RIFF/WAVE with 8/16/24/32-bit integer or 32/64-bit float samples,
// including WAVE_FORMAT_EXTENSIBLE. Throws std::runtime_error on malformed
// or unsupported files.
AudioBuffer ReadWav(const std::filesystem::path& path);

// Writes 32-bit float PCM, little-endian.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio);

// Averages all channels.
std::vector<double> Downmix(const AudioBuffer& audio);

// Linear-interpolation sample-rate conversion.
std::vector<double> Resample(std::span<const double> input, double from_rate,
                             double to_rate);

// Mono source signal at `sample_rate`, `frames` long. `spec` is a WAV path
// or one of "builtin:noise", "builtin:impulse", "builtin:sine:<hz>".
// Shorter files loop. `seed` drives builtin:noise.
std::vector<double> LoadSourceSignal(const std::string& spec,
                                     double sample_rate, size_t frames,
                                     uint64_t seed);

}  // namespace echoforge

#endif  // ECHOFORGE_AUDIO_IO_H_
