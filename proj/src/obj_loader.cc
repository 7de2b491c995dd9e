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

#include "echoforge/obj_loader.h"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace echoforge {
namespace {

// Resolves a 1-based (or negative, relative) OBJ vertex reference such as
// "7", "7/2" or "-1//3".
int ResolveIndex(const std::string& token, int vertex_count) {
  const int raw = std::stoi(token.substr(0, token.find('/')));
  const int index = raw > 0 ? raw - 1 : vertex_count + raw;
  if (raw == 0 || index < 0 || index >= vertex_count) {
    throw std::runtime_error("OBJ face references missing vertex: " + token);
  }
  return index;
}

}  // namespace

ObjMesh ParseObj(std::istream& in) {
  ObjMesh mesh;
  std::string object = "default";
  std::string material;
  std::unordered_map<std::string, int> group_ids;
  int current = -1;
  auto select_group = [&]() {
    const std::string name = material.empty() ? object : material;
    const std::string key = object + '\x1f' + name;
    auto it = group_ids.find(key);
    if (it == group_ids.end()) {
      it = group_ids.emplace(key, static_cast<int>(mesh.groups.size())).first;
      mesh.groups.push_back(name);
      mesh.object_names.push_back(object);
    }
    current = it->second;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) {
        throw std::runtime_error("OBJ line " + std::to_string(line_no) +
                                 ": bad vertex");
      }
      mesh.positions.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        idx.push_back(
            ResolveIndex(tok, static_cast<int>(mesh.positions.size())));
      }
      if (idx.size() < 3) {
        throw std::runtime_error("OBJ line " + std::to_string(line_no) +
                                 ": face with fewer than 3 vertices");
      }
      if (current < 0) select_group();
      for (size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.faces.push_back({idx[0], idx[k], idx[k + 1], current});
      }
    } else if (tag == "g" || tag == "o") {
      std::string name;
      object = (ss >> name) ? name : "default";
      current = -1;
    } else if (tag == "usemtl") {
      ss >> material;
      current = -1;
    }
  }
  return mesh;
}

ObjMesh LoadObj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path.string());
  return ParseObj(in);
}

}  // namespace echoforge
