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

#ifndef ECHOFORGE_SCENE_H_
#define ECHOFORGE_SCENE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "echoforge/bvh.h"
#include "echoforge/trajectory.h"
#include "echoforge/types.h"

namespace echoforge {

struct Material {
  std::string name;
  BandArray absorption;
  BandArray scattering;
};

// Used for triangles whose material cannot be resolved.
Material DefaultMaterial();

struct Source {
  std::string id;
  Vec3 position = Vec3::Zero();
  double radius = 0.0;
  // Intensity at 1 m in each band; the radiated power is 4*pi*gain.
  double gain = 1.0;
  std::string audio;
  std::optional<Trajectory> trajectory;
};

struct Listener {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
  std::optional<Trajectory> trajectory;
};

// Immutable scene snapshot: geometry with its BVH, materials, sources and
// the listener.
class SceneModel {
 public:
  SceneModel(std::vector<Triangle> triangles, std::vector<Material> materials,
             std::vector<Source> sources, Listener listener,
             double speed_of_sound = kDefaultSpeedOfSound);

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Material>& materials() const { return materials_; }
  const std::vector<Source>& sources() const { return sources_; }
  const Listener& listener() const { return listener_; }
  double speed_of_sound() const { return speed_of_sound_; }
  const Bvh& bvh() const { return bvh_; }
  bool free_field() const { return triangles_.empty(); }
  int dropped_degenerate() const { return dropped_degenerate_; }

  const Material& material(int index) const { return materials_[index]; }

  std::optional<RayHit> Intersect(
      const Vec3& origin, const Vec3& direction,
      double max_distance = std::numeric_limits<double>::infinity()) const {
    return bvh_.Intersect(origin, direction, max_distance);
  }

  // True if the segment a -> b is blocked, ignoring kRayEpsilon at each end.
  bool Occluded(const Vec3& a, const Vec3& b) const;

  void set_dropped_degenerate(int n) { dropped_degenerate_ = n; }

 private:
  std::vector<Triangle> triangles_;
  std::vector<Material> materials_;
  std::vector<Source> sources_;
  Listener listener_;
  double speed_of_sound_;
  Bvh bvh_;
  int dropped_degenerate_ = 0;
};

// Builds a scene from the JSON scene description. Relative paths are
// resolved against `base_dir`. Throws std::runtime_error on missing files,
// unknown references or when no source is given.
SceneModel LoadScene(const nlohmann::json& description,
                     const std::filesystem::path& base_dir);

SceneModel LoadSceneFile(const std::filesystem::path& path);

// Axis-aligned box room with inward facing walls, all of one material
// (12 triangles).
std::vector<Triangle> MakeBoxRoom(const Vec3& lo, const Vec3& hi,
                                  int material = 0);

}  // namespace echoforge

#endif  // ECHOFORGE_SCENE_H_
