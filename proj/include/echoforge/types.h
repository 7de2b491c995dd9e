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

#ifndef ECHOFORGE_TYPES_H_
#define ECHOFORGE_TYPES_H_

#include <array>
#include <cstddef>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace echoforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Simulation and rendering use four frequency bands with edges at
// 176 Hz, 775 Hz and 3408 Hz.
inline constexpr int kNumBands = 4;
inline constexpr std::array<double, kNumBands - 1> kBandSplitsHz = {
    176.0, 775.0, 3408.0};

using BandArray = std::array<double, kNumBands>;

inline BandArray FilledBands(double v) { return {v, v, v, v}; }

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultSpeedOfSound = 343.0;

// Quaternion (w, x, y, z) to rotation matrix; the quaternion is normalized.
inline Mat3 QuatToMatrix(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace echoforge

#endif  // ECHOFORGE_TYPES_H_
