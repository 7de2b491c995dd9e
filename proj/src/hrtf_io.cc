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

#include "echoforge/hrtf_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace echoforge {
namespace {

Vec3 FromAzimuthElevation(double az_deg, double el_deg) {
  return Speaker{"", az_deg, el_deg}.Direction();
}

}  // namespace

HrtfData ReadHrtfFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open HRTF file " + path.string());
  std::string header_line;
  std::getline(in, header_line);
  HrtfData out;
  int taps = 0;
  nlohmann::json list;
  try {
    const nlohmann::json header = nlohmann::json::parse(header_line);
    out.sample_rate = header.at("sample_rate").get<double>();
    taps = header.at("taps").get<int>();
    list = header.at("measurements");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad HRTF header in " + path.string() + ": " +
                             e.what());
  }
  if (taps < 1 || taps > kMaxHrtfTaps) {
    throw std::runtime_error("HRTF tap count must be in [1, 512]");
  }
  std::vector<float> buf(2 * taps);
  for (const auto& m : list) {
    HrtfMeasurement h;
    try {
      h.direction = FromAzimuthElevation(m.at("azimuth_deg").get<double>(),
                                         m.at("elevation_deg").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("bad HRTF measurement entry: " +
                               std::string(e.what()));
    }
    in.read(reinterpret_cast<char*>(buf.data()), buf.size() * sizeof(float));
    if (!in) throw std::runtime_error("HRTF payload truncated");
    h.left.assign(buf.begin(), buf.begin() + taps);
    h.right.assign(buf.begin() + taps, buf.end());
    out.measurements.push_back(std::move(h));
  }
  return out;
}

void WriteHrtfFile(const std::filesystem::path& path, const HrtfData& data) {
  if (data.measurements.empty()) {
    throw std::invalid_argument("no HRTF measurements");
  }
  const size_t taps = data.measurements[0].left.size();
  nlohmann::json header;
  header["sample_rate"] = data.sample_rate;
  header["taps"] = taps;
  header["measurements"] = nlohmann::json::array();
  for (const HrtfMeasurement& m : data.measurements) {
    const Vec3 d = m.direction.normalized();
    header["measurements"].push_back(
        {{"azimuth_deg", std::atan2(d.y(), d.x()) * 180.0 / kPi},
         {"elevation_deg",
          std::asin(std::clamp(d.z(), -1.0, 1.0)) * 180.0 / kPi}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header.dump() << '\n';
  for (const HrtfMeasurement& m : data.measurements) {
    if (m.left.size() != taps || m.right.size() != taps) {
      throw std::invalid_argument("HRTF measurements differ in tap count");
    }
    for (const auto* ear : {&m.left, &m.right}) {
      for (double v : *ear) {
        const float f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), sizeof(f));
      }
    }
  }
}

HrtfSH LoadHrtf(const std::string& spec, double sample_rate, int order) {
  if (spec == "builtin:sphere") {
    const auto m = SyntheticSphereHrtf(sample_rate);
    return HrtfSH::Project(m, order, sample_rate);
  }
  const HrtfData data = ReadHrtfFile(spec);
  if (data.sample_rate != sample_rate) {
    throw std::invalid_argument("HRTF sample rate " +
                                std::to_string(data.sample_rate) +
                                " does not match render rate " +
                                std::to_string(sample_rate));
  }
  return HrtfSH::Project(data.measurements, order, sample_rate);
}

std::vector<Speaker> LoadSpeakerLayout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout " + path.string());
  const nlohmann::json j = nlohmann::json::parse(in);
  std::vector<Speaker> out;
  for (const auto& s : j) {
    out.push_back({s.value("name", "ch" + std::to_string(out.size())),
                   s.at("azimuth_deg").get<double>(),
                   s.value("elevation_deg", 0.0)});
  }
  if (out.empty()) throw std::runtime_error("empty speaker layout");
  return out;
}

}  // namespace echoforge
