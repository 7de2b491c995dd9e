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

#include "echoforge/ray_tracer.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "echoforge/parallel.h"

namespace echoforge {
namespace {

struct RayOutput {
  std::vector<Arrival> arrivals;
  std::vector<PathKey> candidates;
  int segments = 0;
  double reflected_length = 0.0;
  int reflected_count = 0;
};

// Distance along the ray to the first intersection with a sphere, or a
// negative value if the ray misses it.
double RaySphere(const Vec3& origin, const Vec3& dir, const Vec3& center,
                 double radius) {
  const Vec3 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  const double s = std::sqrt(disc);
  const double t0 = -b - s;
  if (t0 > 0.0) return t0;
  const double t1 = -b + s;
  return t1 > 0.0 ? 0.0 : -1.0;  // origin inside the sphere
}

void Attenuate(BandArray& e, const BandArray& air, double length) {
  for (int b = 0; b < kNumBands; ++b) {
    if (air[b] > 0.0) e[b] *= std::exp(-air[b] * length);
  }
}

RayOutput TraceOneRay(const SceneModel& scene, const Vec3& listener,
                      std::span<const Vec3> sources,
                      std::span<const double> gains,
                      const TracerConfig& config, Rng rng) {
  RayOutput out;
  const double c = scene.speed_of_sound();
  const Vec3 primary = rng.UnitSphere();
  Vec3 origin = listener;
  Vec3 dir = primary;
  BandArray throughput = FilledBands(1.0);
  double path = 0.0;
  int order = 0;
  bool all_specular = true;
  bool last_specular = true;
  int tris[2] = {-1, -1};

  auto key_for = [&](int source, int ord, bool specular) {
    PathKey k;
    k.source = source;
    k.order = ord;
    k.specular = specular;
    if (ord <= 2) {
      k.tri0 = tris[0];
      k.tri1 = ord >= 2 ? tris[1] : -1;
    }
    return k;
  };

  while (out.segments < config.max_order) {
    const std::optional<RayHit> hit = scene.Intersect(origin, dir);
    ++out.segments;
    const double seg_len =
        hit ? hit->distance : std::numeric_limits<double>::infinity();

    if (order >= 1 && last_specular &&
        !(all_specular && order <= config.image_source_order)) {
      for (size_t s = 0; s < sources.size(); ++s) {
        const double radius = std::max(config.detection_radius, 1e-3);
        const double t = RaySphere(origin, dir, sources[s], radius);
        if (t < 0.0 || t > seg_len) continue;
        const double dist = (sources[s] - origin).norm();
        Arrival a;
        a.key = key_for(static_cast<int>(s), order, false);
        a.time = (path + dist) / c;
        a.direction = primary;
        for (int b = 0; b < kNumBands; ++b) {
          a.energy[b] = throughput[b] * 4.0 * gains[s] / (radius * radius);
        }
        Attenuate(a.energy, config.air_absorption, dist);
        out.arrivals.push_back(a);
      }
    }
    if (!hit) break;

    path += hit->distance;
    Attenuate(throughput, config.air_absorption, hit->distance);
    if (order >= 1) {
      out.reflected_length += hit->distance;
      ++out.reflected_count;
    }
    ++order;
    if (order <= 2) tris[order - 1] = hit->triangle;
    Vec3 n = hit->normal;
    if (n.dot(dir) > 0.0) n = -n;
    const Vec3 x = hit->point;
    const Material& mat = scene.material(hit->material);

    if (all_specular && order <= config.image_source_order) {
      for (size_t s = 0; s < sources.size(); ++s) {
        out.candidates.push_back(key_for(static_cast<int>(s), order, true));
      }
    }

    // Diffuse rain toward every source.
    for (size_t s = 0; s < sources.size(); ++s) {
      const Vec3 to = sources[s] - x;
      const double d = to.norm();
      if (d <= kRayEpsilon) continue;
      const double cos_theta = n.dot(to) / d;
      if (cos_theta <= 0.0) continue;
      if (scene.Occluded(x, sources[s])) continue;
      Arrival a;
      a.key = key_for(static_cast<int>(s), order, false);
      a.time = (path + d) / c;
      a.direction = primary;
      for (int b = 0; b < kNumBands; ++b) {
        a.energy[b] = 4.0 * throughput[b] * (1.0 - mat.absorption[b]) *
                      mat.scattering[b] * cos_theta * gains[s] / (d * d);
      }
      Attenuate(a.energy, config.air_absorption, d);
      out.arrivals.push_back(a);
    }

    if (out.segments >= config.max_order) break;

    double mean_scatter = 0.0;
    for (double v : mat.scattering) mean_scatter += v / kNumBands;
    const bool diffuse = rng.Uniform() < mean_scatter;
    for (int b = 0; b < kNumBands; ++b) {
      const double reflect = 1.0 - mat.absorption[b];
      throughput[b] *= diffuse
                           ? reflect * mat.scattering[b] / mean_scatter
                           : reflect * (1.0 - mat.scattering[b]) /
                                 (1.0 - mean_scatter);
    }
    if (diffuse) {
      dir = rng.CosineHemisphere(n);
      all_specular = false;
      last_specular = false;
    } else {
      dir = dir - 2.0 * dir.dot(n) * n;
      last_specular = true;
    }
    origin = x;
  }
  return out;
}

Vec3 TriangleNormal(const Triangle& t) {
  return (t.v1 - t.v0).cross(t.v2 - t.v0).normalized();
}

double SideOf(const Triangle& t, const Vec3& p) {
  return TriangleNormal(t).dot(p - t.v0);
}

}  // namespace

Vec3 ReflectAcrossPlane(const Triangle& t, const Vec3& p) {
  const Vec3 n = TriangleNormal(t);
  return p - 2.0 * n.dot(p - t.v0) * n;
}

TraceResult TraceRays(const SceneModel& scene, const Vec3& listener,
                      std::span<const Vec3> sources,
                      std::span<const double> source_gains,
                      const TracerConfig& config, const Rng& rng) {
  if (config.primary_rays < 1 || config.max_order < 1) {
    throw std::invalid_argument("primary_rays and max_order must be >= 1");
  }
  if (sources.size() != source_gains.size()) {
    throw std::invalid_argument("one gain per source required");
  }
  TraceResult result;
  result.stats.open_field = scene.free_field();

  const int64_t budget =
      static_cast<int64_t>(config.primary_rays) * config.max_order;
  // Rays that escape early leave budget behind; it is spent on further
  // primary rays in follow-up waves.
  constexpr int kMaxWaves = 32;
  std::vector<RayOutput> outputs;
  int64_t used = 0;
  int wave_size = config.primary_rays;
  for (int wave = 0; wave < kMaxWaves && wave_size > 0; ++wave) {
    const size_t first = outputs.size();
    outputs.resize(first + wave_size);
    ParallelFor(wave_size, config.threads, [&](int i) {
      const uint64_t index = first + i;
      outputs[first + i] = TraceOneRay(scene, listener, sources, source_gains,
                                       config, rng.Derive(index));
    });
    int64_t wave_segments = 0;
    for (size_t i = first; i < outputs.size(); ++i) {
      wave_segments += outputs[i].segments;
    }
    used += wave_segments;
    const int64_t remaining = budget - used;
    const double per_ray =
        std::max(1.0, static_cast<double>(wave_segments) / wave_size);
    wave_size = static_cast<int>(
        std::min<double>(std::floor(remaining / per_ray), 1 << 20));
  }

  const double n = static_cast<double>(outputs.size());
  double reflected_length = 0.0;
  std::set<PathKey> candidates;
  for (RayOutput& o : outputs) {
    for (Arrival& a : o.arrivals) {
      for (double& e : a.energy) e /= n;
      result.arrivals.push_back(a);
    }
    candidates.insert(o.candidates.begin(), o.candidates.end());
    result.stats.total_segments += o.segments;
    result.stats.reflected_segments += o.reflected_count;
    reflected_length += o.reflected_length;
  }
  result.specular_candidates.assign(candidates.begin(), candidates.end());
  result.stats.primary_rays_emitted = static_cast<int64_t>(outputs.size());
  if (result.stats.reflected_segments > 0) {
    result.stats.mean_free_path =
        reflected_length / result.stats.reflected_segments;
  }
  return result;
}

std::optional<SpecularPath> ValidateSpecularPath(
    const SceneModel& scene, const Vec3& listener, const Vec3& source,
    double source_gain, const PathKey& key, const TracerConfig& config) {
  if (!key.specular || key.order < 1 || key.order > 2) return std::nullopt;
  const auto& tris = scene.triangles();
  const int ids[2] = {key.tri0, key.tri1};
  for (int k = 0; k < key.order; ++k) {
    if (ids[k] < 0 || ids[k] >= static_cast<int>(tris.size())) {
      return std::nullopt;
    }
  }
  // images[k] is the source mirrored through triangles k..order-1.
  Vec3 images[3];
  images[key.order] = source;
  for (int k = key.order - 1; k >= 0; --k) {
    images[k] = ReflectAcrossPlane(tris[ids[k]], images[k + 1]);
  }
  Vec3 from = listener;
  for (int k = 0; k < key.order; ++k) {
    const Triangle& t = tris[ids[k]];
    const double side_from = SideOf(t, from);
    const double side_next = SideOf(t, images[k + 1]);
    if (side_from * side_next <= 0.0) return std::nullopt;
    const Vec3 to = images[k] - from;
    const double dist = to.norm();
    const std::optional<RayHit> hit = scene.Intersect(from, to / dist, dist);
    if (!hit || hit->triangle != ids[k]) return std::nullopt;
    from = hit->point;
  }
  if (scene.Occluded(from, source)) return std::nullopt;

  SpecularPath p;
  const Vec3 to_image = images[0] - listener;
  p.length = to_image.norm();
  p.direction = to_image / p.length;
  for (int b = 0; b < kNumBands; ++b) {
    double e = source_gain / (p.length * p.length);
    for (int k = 0; k < key.order; ++k) {
      const Material& m = scene.material(tris[ids[k]].material);
      e *= (1.0 - m.absorption[b]) * (1.0 - m.scattering[b]);
    }
    p.energy[b] = e;
  }
  Attenuate(p.energy, config.air_absorption, p.length);
  return p;
}

}  // namespace echoforge
