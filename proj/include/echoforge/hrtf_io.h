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

#ifndef ECHOFORGE_HRTF_IO_H_
#define ECHOFORGE_HRTF_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "echoforge/spatializer.h"

namespace echoforge {

struct HrtfData {
  double sample_rate = 44100.0;
  std::vector<HrtfMeasurement> measurements;
};

// File layout: one line of JSON
//   {"measurements":[{"azimuth_deg":..,"elevation_deg":..},...],
//    "sample_rate":..,"taps":..}
// terminated by '\n', then float32 little-endian taps; for each direction
// the left ear filter followed by the right ear filter.
HrtfData ReadHrtfFile(const std::filesystem::path& path);
void WriteHrtfFile(const std::filesystem::path& path, const HrtfData& data);

// `spec` is "builtin:sphere" or a path. Throws if the file's sample rate
// differs from `sample_rate`.
HrtfSH LoadHrtf(const std::string& spec, double sample_rate, int order);

// JSON list of {"name","azimuth_deg","elevation_deg"}.
std::vector<Speaker> LoadSpeakerLayout(const std::filesystem::path& path);

}  // namespace echoforge

#endif  // ECHOFORGE_HRTF_IO_H_
