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

#include "echoforge/bvh.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace echoforge {
namespace {

constexpr int kBins = 16;
constexpr int kMaxLeafSize = 4;

struct Box {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void Grow(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void Grow(const Box& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  double Area() const {
    if (lo.x() > hi.x()) return 0.0;
    const Vec3 e = hi - lo;
    return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
  }
};

Box TriangleBox(const Triangle& t) {
  Box b;
  b.Grow(t.v0);
  b.Grow(t.v1);
  b.Grow(t.v2);
  return b;
}

Vec3 Centroid(const Triangle& t) { return (t.v0 + t.v1 + t.v2) / 3.0; }

}  // namespace

Bvh::Bvh(std::span<const Triangle> triangles) {
  if (triangles.empty()) return;
  std::vector<int> order(triangles.size());
  std::iota(order.begin(), order.end(), 0);
  nodes_.reserve(2 * triangles.size());
  Build(order, 0, static_cast<int>(order.size()), triangles);
  tris_.reserve(triangles.size());
  for (int i : order) {
    const Triangle& t = triangles[i];
    PreparedTriangle p;
    p.v0 = t.v0;
    p.e1 = t.v1 - t.v0;
    p.e2 = t.v2 - t.v0;
    p.normal = p.e1.cross(p.e2).normalized();
    p.material = t.material;
    p.original_index = i;
    tris_.push_back(p);
  }
}

int Bvh::Build(std::vector<int>& order, int begin, int end,
               std::span<const Triangle> triangles) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Box bounds;
  Box centroid_bounds;
  for (int i = begin; i < end; ++i) {
    bounds.Grow(TriangleBox(triangles[order[i]]));
    centroid_bounds.Grow(Centroid(triangles[order[i]]));
  }
  // Pad so that the float box always encloses the double geometry.
  const Vec3 pad = Vec3::Constant(1e-5) +
                   1e-6 * bounds.hi.cwiseAbs().cwiseMax(bounds.lo.cwiseAbs());
  nodes_[index].lo = (bounds.lo - pad).cast<float>();
  nodes_[index].hi = (bounds.hi + pad).cast<float>();

  const int count = end - begin;
  auto make_leaf = [&]() {
    nodes_[index].offset = begin;
    nodes_[index].count = static_cast<uint16_t>(count);
    nodes_[index].axis = 0;
    return index;
  };
  if (count <= kMaxLeafSize) return make_leaf();

  // Binned SAH over the centroid extent.
  double best_cost = std::numeric_limits<double>::infinity();
  int best_axis = -1;
  int best_split = -1;
  const Vec3 extent = centroid_bounds.hi - centroid_bounds.lo;
  for (int axis = 0; axis < 3; ++axis) {
    if (extent[axis] <= 1e-12) continue;
    std::array<Box, kBins> bin_box;
    std::array<int, kBins> bin_count{};
    const double scale = kBins / extent[axis];
    for (int i = begin; i < end; ++i) {
      const Triangle& t = triangles[order[i]];
      int b = static_cast<int>((Centroid(t)[axis] - centroid_bounds.lo[axis]) *
                               scale);
      b = std::clamp(b, 0, kBins - 1);
      bin_count[b]++;
      bin_box[b].Grow(TriangleBox(t));
    }
    std::array<double, kBins> right_area{};
    std::array<int, kBins> right_count{};
    Box acc;
    int n = 0;
    for (int b = kBins - 1; b > 0; --b) {
      acc.Grow(bin_box[b]);
      n += bin_count[b];
      right_area[b] = acc.Area();
      right_count[b] = n;
    }
    acc = Box();
    n = 0;
    for (int b = 0; b < kBins - 1; ++b) {
      acc.Grow(bin_box[b]);
      n += bin_count[b];
      if (n == 0 || right_count[b + 1] == 0) continue;
      const double cost =
          n * acc.Area() + right_count[b + 1] * right_area[b + 1];
      if (cost < best_cost) {
        best_cost = cost;
        best_axis = axis;
        best_split = b;
      }
    }
  }

  int mid;
  if (best_axis < 0) {
    if (count <= 64) return make_leaf();
    // Coincident centroids: split by index.
    mid = begin + count / 2;
    best_axis = 0;
  } else {
    const double leaf_cost = count * bounds.Area();
    if (count <= 16 && best_cost >= leaf_cost) return make_leaf();
    const double scale = kBins / extent[best_axis];
    const auto it = std::partition(
        order.begin() + begin, order.begin() + end, [&](int t) {
          int b = static_cast<int>(
              (Centroid(triangles[t])[best_axis] -
               centroid_bounds.lo[best_axis]) *
              scale);
          return std::clamp(b, 0, kBins - 1) <= best_split;
        });
    mid = static_cast<int>(it - order.begin());
    if (mid == begin || mid == end) mid = begin + count / 2;
  }
  Build(order, begin, mid, triangles);
  const int right = Build(order, mid, end, triangles);
  nodes_[index].offset = static_cast<uint32_t>(right);
  nodes_[index].count = 0;
  nodes_[index].axis = static_cast<uint16_t>(best_axis);
  return index;
}

bool Bvh::IntersectTriangle(const PreparedTriangle& t, const Vec3& o,
                            const Vec3& d, double t_max,
                            double* t_out) const {
  // Moller-Trumbore.
  const Vec3 p = d.cross(t.e2);
  const double det = t.e1.dot(p);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec3 s = o - t.v0;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 q = s.cross(t.e1);
  const double v = d.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  const double dist = t.e2.dot(q) * inv;
  if (dist <= kRayEpsilon || dist > t_max) return false;
  *t_out = dist;
  return true;
}

template <bool kAnyHit>
bool Bvh::Traverse(const Vec3& origin, const Vec3& direction,
                   double max_distance, RayHit* hit) const {
  if (nodes_.empty()) return false;
  const Eigen::Vector3f o = origin.cast<float>();
  Eigen::Vector3f inv;
  for (int k = 0; k < 3; ++k) {
    inv[k] = direction[k] != 0.0 ? static_cast<float>(1.0 / direction[k])
                                 : std::numeric_limits<float>::infinity();
  }
  double best = max_distance;
  int best_tri = -1;
  std::array<uint32_t, 64> stack;
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    // Slab test.
    float t0 = 0.0f;
    float t1 = static_cast<float>(std::min(best, 1e30)) * 1.0001f + 1e-4f;
    bool miss = false;
    for (int k = 0; k < 3 && !miss; ++k) {
      float a = (node.lo[k] - o[k]) * inv[k];
      float b = (node.hi[k] - o[k]) * inv[k];
      if (std::isnan(a) || std::isnan(b)) {
        // Ray parallel to the slab and on its boundary plane.
        if (o[k] < node.lo[k] || o[k] > node.hi[k]) miss = true;
        continue;
      }
      if (a > b) std::swap(a, b);
      t0 = std::max(t0, a);
      t1 = std::min(t1, b);
      if (t0 > t1) miss = true;
    }
    if (miss) continue;
    if (node.count > 0) {
      for (uint32_t i = node.offset; i < node.offset + node.count; ++i) {
        double t;
        if (IntersectTriangle(tris_[i], origin, direction, best, &t)) {
          if constexpr (kAnyHit) {
            if (t < max_distance) return true;
          }
          // Ties resolve to the lowest original index so results match the
          // brute-force reference.
          if (t < best || (t == best && best_tri >= 0 &&
                           tris_[i].original_index <
                               tris_[best_tri].original_index)) {
            best = t;
            best_tri = static_cast<int>(i);
          }
        }
      }
      continue;
    }
    const uint32_t near_child =
        static_cast<uint32_t>(&node - nodes_.data()) + 1;
    const uint32_t far_child = node.offset;
    if (sp + 2 > static_cast<int>(stack.size())) continue;
    if (direction[node.axis] < 0.0) {
      stack[sp++] = near_child;
      stack[sp++] = far_child;
    } else {
      stack[sp++] = far_child;
      stack[sp++] = near_child;
    }
  }
  if (best_tri < 0) return false;
  if (hit != nullptr) {
    const PreparedTriangle& t = tris_[best_tri];
    hit->distance = best;
    hit->triangle = t.original_index;
    hit->material = t.material;
    hit->normal = t.normal;
    hit->point = origin + best * direction;
  }
  return true;
}

std::optional<RayHit> Bvh::Intersect(const Vec3& origin, const Vec3& direction,
                                     double max_distance) const {
  RayHit hit;
  if (!Traverse<false>(origin, direction, max_distance, &hit)) {
    return std::nullopt;
  }
  return hit;
}

bool Bvh::Occluded(const Vec3& origin, const Vec3& direction,
                   double max_distance) const {
  return Traverse<true>(origin, direction, max_distance, nullptr);
}

std::optional<RayHit> Bvh::IntersectBruteForce(const Vec3& origin,
                                               const Vec3& direction,
                                               double max_distance) const {
  double best = max_distance;
  int best_tri = -1;
  for (size_t i = 0; i < tris_.size(); ++i) {
    double t;
    if (IntersectTriangle(tris_[i], origin, direction, best, &t)) {
      if (t < best || (t == best && best_tri >= 0 &&
                       tris_[i].original_index <
                           tris_[best_tri].original_index)) {
        best = t;
        best_tri = static_cast<int>(i);
      }
    }
  }
  if (best_tri < 0) return std::nullopt;
  const PreparedTriangle& t = tris_[best_tri];
  return RayHit{best, t.original_index, t.material, t.normal,
                origin + best * direction};
}

}  // namespace echoforge
