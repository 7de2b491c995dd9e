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

#ifndef ECHOFORGE_BVH_H_
#define ECHOFORGE_BVH_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "echoforge/types.h"

namespace echoforge {

struct Triangle {
  Vec3 v0;
  Vec3 v1;
  Vec3 v2;
  int material = -1;
};

struct RayHit {
  double distance;
  int triangle;
  int material;
  Vec3 normal;  // geometric, unit length, not oriented toward the ray
  Vec3 point;
};

// Offset that keeps rays leaving a surface from re-hitting it.
inline constexpr double kRayEpsilon = 1e-4;

// Bounding volume hierarchy over triangles, built with a binned
// surface-area heuristic. Immutable after construction.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(std::span<const Triangle> triangles);

  bool empty() const { return nodes_.empty(); }
  int triangle_count() const { return static_cast<int>(tris_.size()); }
  int node_count() const { return static_cast<int>(nodes_.size()); }

  // Nearest hit with distance in (kRayEpsilon, max_distance].
  std::optional<RayHit> Intersect(
      const Vec3& origin, const Vec3& direction,
      double max_distance = std::numeric_limits<double>::infinity()) const;

  // True if anything is hit in (kRayEpsilon, max_distance).
  bool Occluded(const Vec3& origin, const Vec3& direction,
                double max_distance) const;

  // Reference implementation that tests every triangle.
  std::optional<RayHit> IntersectBruteForce(
      const Vec3& origin, const Vec3& direction,
      double max_distance = std::numeric_limits<double>::infinity()) const;

 private:
  struct PreparedTriangle {
    Vec3 v0;
    Vec3 e1;
    Vec3 e2;
    Vec3 normal;
    int material;
    int original_index;
  };
  struct Node {
    Eigen::Vector3f lo;
    Eigen::Vector3f hi;
    // Interior: left child is this+1, right child at `offset`.
    // Leaf: triangles [offset, offset + count).
    uint32_t offset;
    uint16_t count;
    uint16_t axis;
  };

  template <bool kAnyHit>
  bool Traverse(const Vec3& origin, const Vec3& direction, double max_distance,
                RayHit* hit) const;

  int Build(std::vector<int>& order, int begin, int end,
            std::span<const Triangle> triangles);

  bool IntersectTriangle(const PreparedTriangle& t, const Vec3& o,
                         const Vec3& d, double t_max, double* t_out) const;

  std::vector<PreparedTriangle> tris_;
  std::vector<Node> nodes_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_BVH_H_
