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

#ifndef ECHOFORGE_TRAJECTORY_H_
#define ECHOFORGE_TRAJECTORY_H_

#include <filesystem>
#include <istream>
#include <vector>

#include "echoforge/types.h"

namespace echoforge {

struct Pose {
  Vec3 position;
  Eigen::Quaterniond orientation;
};

// Keyframed pose track read from CSV rows "time_s,px,py,pz,qw,qx,qy,qz".
// Positions are interpolated linearly and orientations by normalized
// linear interpolation; times outside the keyframe range clamp.
class Trajectory {
 public:
  struct Key {
    double time;
    Pose pose;
  };

  explicit Trajectory(std::vector<Key> keys);

  static Trajectory Parse(std::istream& in);
  static Trajectory Load(const std::filesystem::path& path);

  Pose Sample(double time) const;
  const std::vector<Key>& keys() const { return keys_; }

 private:
  std::vector<Key> keys_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_TRAJECTORY_H_
