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

#ifndef ECHOFORGE_RAY_TRACER_H_
#define ECHOFORGE_RAY_TRACER_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "echoforge/rng.h"
#include "echoforge/scene.h"
#include "echoforge/types.h"

namespace echoforge {

// Backward path tracer shared by the real-time propagation module and the
// reference renderer. Rays start at the listener; every diffuse bounce is
// connected to each source (next-event estimation), and specular
// continuations are tested against a detection sphere around each source.
// Purely specular paths up to `image_source_order` reflections are instead
// reported as triangle sequences and validated exactly by the caller.
struct TracerConfig {
  int primary_rays = 50;
  int max_order = 200;
  int image_source_order = 2;
  // Lower bound for the detection sphere radius around each source.
  double detection_radius = 1.0;
  // Intensity attenuation per meter in each band (0 disables air
  // absorption).
  BandArray air_absorption = FilledBands(0.0);
  // Worker threads; 0 uses DefaultThreadCount().
  int threads = 0;
};

// Identifies a low-order path family: the source, reflection order, whether
// every bounce was specular, and the triangles hit (-1 when unused).
struct PathKey {
  int source = 0;
  int order = 0;
  bool specular = false;
  int tri0 = -1;
  int tri1 = -1;

  auto operator<=>(const PathKey&) const = default;
};

// One energy packet arriving at the listener.
struct Arrival {
  PathKey key;         // tri0/tri1 are only meaningful for order <= 2
  double time;         // seconds after emission
  BandArray energy;    // intensity gain, already divided by the ray count
  Vec3 direction;      // unit vector from the listener toward the arrival
};

struct TraceStats {
  double mean_free_path = 0.0;
  int64_t primary_rays_emitted = 0;
  int64_t total_segments = 0;
  int64_t reflected_segments = 0;
  bool open_field = false;
};

struct TraceResult {
  std::vector<Arrival> arrivals;
  // Distinct all-specular triangle sequences of order <= image_source_order
  // reaching each source's side of the surface; to be validated with
  // ValidateSpecularPath.
  std::vector<PathKey> specular_candidates;
  TraceStats stats;
};

// Traces one frame. The result is a deterministic function of the inputs and
// `rng`'s seed, independent of the thread count.
TraceResult TraceRays(const SceneModel& scene, const Vec3& listener,
                      std::span<const Vec3> sources,
                      std::span<const double> source_gains,
                      const TracerConfig& config, const Rng& rng);

// An exactly validated specular reflection path.
struct SpecularPath {
  double length;
  BandArray energy;  // intensity gain at the listener
  Vec3 direction;    // arrival direction at the listener
};

// Image-source validation of the triangle sequence in `key` (listener side
// first). Returns nullopt if the path is not geometrically valid or is
// occluded.
std::optional<SpecularPath> ValidateSpecularPath(
    const SceneModel& scene, const Vec3& listener, const Vec3& source,
    double source_gain, const PathKey& key, const TracerConfig& config);

// Mirror image of `p` in the plane of triangle `t`.
Vec3 ReflectAcrossPlane(const Triangle& t, const Vec3& p);

}  // namespace echoforge

#endif  // ECHOFORGE_RAY_TRACER_H_
