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

#ifndef ECHOFORGE_RNG_H_
#define ECHOFORGE_RNG_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "echoforge/types.h"

namespace echoforge {

// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr uint64_t MixBits(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Child streams are derived by key so that
// per-frame and per-ray sequences do not depend on evaluation order.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(MixBits(seed)) {}

  uint64_t seed() const { return seed_; }

  Rng Derive(uint64_t key) const { return Rng(MixBits(seed_ ^ MixBits(key))); }

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  double Gaussian(double mean, double sigma) {
    // Box-Muller; the library distributions are not portable across
    // standard library implementations.
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * kPi * u2);
  }

  Vec3 UnitSphere() {
    const double z = 1.0 - 2.0 * Uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * Uniform();
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  // Cosine-weighted direction about unit normal `n`.
  Vec3 CosineHemisphere(const Vec3& n) {
    const double u1 = Uniform();
    const double u2 = Uniform();
    const double r = std::sqrt(u1);
    const double phi = 2.0 * kPi * u2;
    const Vec3 t = (std::abs(n.x()) > 0.9 ? Vec3::UnitY() : Vec3::UnitX())
                       .cross(n)
                       .normalized();
    const Vec3 b = n.cross(t);
    return (r * std::cos(phi) * t + r * std::sin(phi) * b +
            std::sqrt(std::max(0.0, 1.0 - u1)) * n)
        .normalized();
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_RNG_H_
