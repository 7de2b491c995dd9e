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

#include "echoforge/trajectory.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace echoforge {

Trajectory::Trajectory(std::vector<Key> keys) : keys_(std::move(keys)) {
  if (keys_.empty()) throw std::invalid_argument("trajectory has no keys");
  std::stable_sort(keys_.begin(), keys_.end(),
                   [](const Key& a, const Key& b) { return a.time < b.time; });
  for (Key& k : keys_) k.pose.orientation.normalize();
}

Trajectory Trajectory::Parse(std::istream& in) {
  std::vector<Key> keys;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v[8];
    int n = 0;
    while (n < 8 && ss >> v[n]) ++n;
    if (n == 0) continue;  // header row
    if (n != 8) {
      throw std::runtime_error("trajectory row needs 8 values: " + line);
    }
    keys.push_back({v[0],
                    {Vec3(v[1], v[2], v[3]),
                     Eigen::Quaterniond(v[4], v[5], v[6], v[7])}});
  }
  return Trajectory(std::move(keys));
}

Trajectory Trajectory::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory " + path.string());
  return Parse(in);
}

Pose Trajectory::Sample(double time) const {
  if (time <= keys_.front().time) return keys_.front().pose;
  if (time >= keys_.back().time) return keys_.back().pose;
  const auto hi = std::upper_bound(
      keys_.begin(), keys_.end(), time,
      [](double t, const Key& k) { return t < k.time; });
  const auto lo = hi - 1;
  const double span = hi->time - lo->time;
  const double f = span > 0.0 ? (time - lo->time) / span : 0.0;
  Pose p;
  p.position = (1.0 - f) * lo->pose.position + f * hi->pose.position;
  Eigen::Vector4d a = lo->pose.orientation.coeffs();
  Eigen::Vector4d b = hi->pose.orientation.coeffs();
  if (a.dot(b) < 0.0) b = -b;
  Eigen::Vector4d q = (1.0 - f) * a + f * b;
  p.orientation = Eigen::Quaterniond(q[3], q[0], q[1], q[2]).normalized();
  return p;
}

}  // namespace echoforge
