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

#include "echoforge/json_io.h"

#include <stdexcept>
#include <string>

namespace echoforge {
namespace {

BandArray BandsFromJson(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw std::invalid_argument(std::string("metrics missing '") + key + "'");
  }
  const auto& a = j.at(key);
  if (a.size() != kNumBands) {
    throw std::invalid_argument(std::string("band count mismatch in '") + key +
                                "': expected " + std::to_string(kNumBands) +
                                ", got " + std::to_string(a.size()));
  }
  BandArray out;
  for (int b = 0; b < kNumBands; ++b) out[b] = a[b].get<double>();
  return out;
}

}  // namespace

nlohmann::json ToJson(const BandArray& bands) {
  return nlohmann::json(std::vector<double>(bands.begin(), bands.end()));
}

nlohmann::json ToJson(const SHVector& v) {
  return nlohmann::json(
      std::vector<double>(v.coeffs().data(), v.coeffs().data() + v.size()));
}

nlohmann::json ToJson(const ReverbParams& p) {
  nlohmann::json j;
  j["rt60"] = ToJson(p.rt60);
  j["reverb_gain"] = ToJson(p.reverb_gain);
  j["total_intensity"] = ToJson(p.total_intensity);
  j["predelay"] = p.predelay;
  j["mean_free_path"] = p.mean_free_path;
  j["avg_directivity"] = nlohmann::json::array();
  for (const SHVector& v : p.avg_directivity) {
    j["avg_directivity"].push_back(ToJson(v));
  }
  j["comb_input_directivity"] = nlohmann::json::array();
  for (const SHVector& v : p.comb_input_directivity) {
    j["comb_input_directivity"].push_back(ToJson(v));
  }
  j["comb_delays"] = p.comb_delays;
  j["comb_delay_samples"] = p.comb_delay_samples;
  j["comb_delay_center"] = p.comb_delay_center;
  j["band_silent"] = std::vector<bool>(p.band_silent.begin(),
                                       p.band_silent.end());
  j["silent"] = p.silent;
  return j;
}

nlohmann::json ToJson(const AcousticMetrics& m) {
  return {{"rt60", ToJson(m.rt60)}, {"c80", ToJson(m.c80)},
          {"d50", ToJson(m.d50)},   {"g", ToJson(m.g)},
          {"ts", ToJson(m.ts)}};
}

AcousticMetrics MetricsFromJson(const nlohmann::json& j) {
  AcousticMetrics m;
  m.rt60 = BandsFromJson(j, "rt60");
  m.c80 = BandsFromJson(j, "c80");
  m.d50 = BandsFromJson(j, "d50");
  m.g = BandsFromJson(j, "g");
  m.ts = BandsFromJson(j, "ts");
  return m;
}

}  // namespace echoforge
