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

#include "echoforge/scene.h"

#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "echoforge/obj_loader.h"

namespace echoforge {
namespace {

using nlohmann::json;

BandArray ReadBands(const json& j, const char* what) {
  if (!j.is_array() || j.size() != kNumBands) {
    throw std::runtime_error(std::string("material ") + what +
                             " needs exactly 4 band values");
  }
  BandArray out;
  for (int b = 0; b < kNumBands; ++b) {
    out[b] = j[b].get<double>();
    if (!(out[b] >= 0.0 && out[b] <= 1.0)) {
      throw std::runtime_error(std::string("material ") + what +
                               " coefficient outside [0, 1]");
    }
  }
  return out;
}

Vec3 ReadVec3(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("expected a 3-element position");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

bool IsDegenerate(const Triangle& t) {
  return (t.v1 - t.v0).cross(t.v2 - t.v0).norm() < 1e-12;
}

}  // namespace

Material DefaultMaterial() {
  return {"default", FilledBands(0.1), FilledBands(0.5)};
}

SceneModel::SceneModel(std::vector<Triangle> triangles,
                       std::vector<Material> materials,
                       std::vector<Source> sources, Listener listener,
                       double speed_of_sound)
    : triangles_(std::move(triangles)),
      materials_(std::move(materials)),
      sources_(std::move(sources)),
      listener_(std::move(listener)),
      speed_of_sound_(speed_of_sound) {
  if (!(speed_of_sound_ > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  int default_index = -1;
  for (Triangle& t : triangles_) {
    if (t.material < 0 || t.material >= static_cast<int>(materials_.size())) {
      if (default_index < 0) {
        default_index = static_cast<int>(materials_.size());
        materials_.push_back(DefaultMaterial());
      }
      t.material = default_index;
    }
  }
  for (const Source& s : sources_) {
    if (!(s.radius >= 0.0)) {
      throw std::invalid_argument("source radius must be >= 0");
    }
  }
  bvh_ = Bvh(triangles_);
}

bool SceneModel::Occluded(const Vec3& a, const Vec3& b) const {
  const Vec3 d = b - a;
  const double len = d.norm();
  if (len <= 2.0 * kRayEpsilon || bvh_.empty()) return false;
  return bvh_.Occluded(a, d / len, len - kRayEpsilon);
}

SceneModel LoadScene(const json& desc, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  std::vector<Material> materials;
  std::map<std::string, int> material_index;
  if (desc.contains("materials")) {
    for (const json& m : desc.at("materials")) {
      Material mat;
      mat.name = m.at("name").get<std::string>();
      mat.absorption = ReadBands(m.at("absorption"), "absorption");
      mat.scattering = m.contains("scattering")
                           ? ReadBands(m.at("scattering"), "scattering")
                           : DefaultMaterial().scattering;
      material_index[mat.name] = static_cast<int>(materials.size());
      materials.push_back(mat);
    }
  }
  std::map<std::string, std::string> bindings;
  if (desc.contains("material_bindings")) {
    for (const auto& [group, name] : desc.at("material_bindings").items()) {
      const std::string mat = name.get<std::string>();
      if (!material_index.count(mat)) {
        throw std::runtime_error("binding for group '" + group +
                                 "' names unknown material '" + mat + "'");
      }
      bindings[group] = mat;
    }
  }

  std::vector<Triangle> triangles;
  int dropped = 0;
  if (desc.contains("mesh") && !desc.at("mesh").is_null()) {
    const ObjMesh mesh = LoadObj(resolve(desc.at("mesh").get<std::string>()));
    std::vector<int> group_material(mesh.groups.size(), -1);
    for (size_t g = 0; g < mesh.groups.size(); ++g) {
      // Object/group binding first, then a binding on the usemtl name, then
      // a material with the same name.
      for (const std::string& key : {mesh.object_names[g], mesh.groups[g]}) {
        if (auto it = bindings.find(key); it != bindings.end()) {
          group_material[g] = material_index.at(it->second);
          break;
        }
      }
      if (group_material[g] < 0) {
        if (auto it = material_index.find(mesh.groups[g]);
            it != material_index.end()) {
          group_material[g] = it->second;
        }
      }
    }
    for (const ObjMesh::Face& f : mesh.faces) {
      Triangle t{mesh.positions[f.a], mesh.positions[f.b], mesh.positions[f.c],
                 group_material[f.group]};
      if (IsDegenerate(t)) {
        ++dropped;
        continue;
      }
      triangles.push_back(t);
    }
  }

  std::vector<Source> sources;
  if (desc.contains("sources")) {
    for (const json& s : desc.at("sources")) {
      Source src;
      src.id = s.value("id", "source" + std::to_string(sources.size()));
      src.position = ReadVec3(s.at("position"));
      src.radius = s.value("radius", 0.0);
      src.gain = s.value("gain", 1.0);
      src.audio = s.value("audio", std::string("builtin:noise"));
      if (!src.audio.starts_with("builtin:")) {
        src.audio = resolve(src.audio).string();
      }
      if (s.contains("trajectory")) {
        src.trajectory =
            Trajectory::Load(resolve(s.at("trajectory").get<std::string>()));
      }
      if (!(src.radius >= 0.0)) {
        throw std::runtime_error("source '" + src.id + "' has negative radius");
      }
      sources.push_back(std::move(src));
    }
  }
  if (sources.empty()) throw std::runtime_error("scene has no sources");

  Listener listener;
  if (desc.contains("listener")) {
    const json& l = desc.at("listener");
    listener.position = ReadVec3(l.at("position"));
    if (l.contains("orientation_quat")) {
      const json& q = l.at("orientation_quat");
      if (!q.is_array() || q.size() != 4) {
        throw std::runtime_error("orientation_quat needs 4 values (w,x,y,z)");
      }
      listener.orientation =
          QuatToMatrix(q[0].get<double>(), q[1].get<double>(),
                       q[2].get<double>(), q[3].get<double>());
    }
    if (l.contains("trajectory")) {
      listener.trajectory =
          Trajectory::Load(resolve(l.at("trajectory").get<std::string>()));
    }
  }

  SceneModel scene(std::move(triangles), std::move(materials),
                   std::move(sources), std::move(listener),
                   desc.value("speed_of_sound", kDefaultSpeedOfSound));
  scene.set_dropped_degenerate(dropped);
  return scene;
}

SceneModel LoadSceneFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file " + path.string());
  json desc;
  try {
    in >> desc;
  } catch (const json::exception& e) {
    throw std::runtime_error("scene file " + path.string() + ": " + e.what());
  }
  return LoadScene(desc, path.parent_path());
}

std::vector<Triangle> MakeBoxRoom(const Vec3& lo, const Vec3& hi,
                                  int material) {
  const Vec3 c[8] = {
      {lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
      {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
      {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
      {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()},
  };
  // Quads wound so that normals point into the room.
  const int quads[6][4] = {
      {0, 1, 2, 3},  // floor, +z
      {4, 7, 6, 5},  // ceiling, -z
      {0, 4, 5, 1},  // y = lo, +y
      {3, 2, 6, 7},  // y = hi, -y
      {0, 3, 7, 4},  // x = lo, +x
      {1, 5, 6, 2},  // x = hi, -x
  };
  std::vector<Triangle> out;
  for (const auto& q : quads) {
    out.push_back({c[q[0]], c[q[1]], c[q[2]], material});
    out.push_back({c[q[0]], c[q[2]], c[q[3]], material});
  }
  return out;
}

}  // namespace echoforge
