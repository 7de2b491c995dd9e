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

#include "echoforge/tdesign.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace echoforge {
namespace {

#include "tdesign_tables.inc"

template <size_t N>
std::vector<Vec3> FromTable(const double (&table)[N][3]) {
  std::vector<Vec3> out;
  out.reserve(N);
  for (const auto& row : table) {
    out.push_back(Vec3(row[0], row[1], row[2]).normalized());
  }
  return out;
}

std::vector<Vec3> Octahedron() {
  return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
}

std::vector<Vec3> Icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> out;
  for (double a : {-1.0, 1.0}) {
    for (double b : {-phi, phi}) {
      out.push_back(Vec3(0, a, b).normalized());
      out.push_back(Vec3(a, b, 0).normalized());
      out.push_back(Vec3(b, 0, a).normalized());
    }
  }
  return out;
}

const std::vector<TDesign>& Designs() {
  static const std::vector<TDesign> designs = {
      {3, Octahedron()},
      {5, Icosahedron()},
      {9, FromTable(kDesign9)},
      {21, FromTable(kDesign21)},
  };
  return designs;
}

}  // namespace

std::span<const TDesign> EmbeddedTDesigns() { return Designs(); }

const TDesign& TDesignForDegree(int min_degree) {
  for (const TDesign& d : Designs()) {
    if (d.degree >= min_degree) return d;
  }
  throw std::invalid_argument("no embedded t-design of degree " +
                              std::to_string(min_degree));
}

}  // namespace echoforge
