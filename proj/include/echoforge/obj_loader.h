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

#ifndef ECHOFORGE_OBJ_LOADER_H_
#define ECHOFORGE_OBJ_LOADER_H_

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "echoforge/types.h"

namespace echoforge {

// Triangulated Wavefront OBJ geometry. Only vertex positions are read;
// polygons are fan-triangulated.
struct ObjMesh {
  struct Face {
    int a;
    int b;
    int c;
    int group;  // index into `groups`
  };
  std::vector<Vec3> positions;
  std::vector<Face> faces;
  // Name of each face group: the active "usemtl" name when present,
  // otherwise the last "g"/"o" name, otherwise "default".
  std::vector<std::string> groups;
  // For each group, the "g"/"o" object name it was declared under.
  std::vector<std::string> object_names;
};

ObjMesh ParseObj(std::istream& in);
ObjMesh LoadObj(const std::filesystem::path& path);

}  // namespace echoforge

#endif  // ECHOFORGE_OBJ_LOADER_H_
