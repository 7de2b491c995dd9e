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

#ifndef ECHOFORGE_SH_H_
#define ECHOFORGE_SH_H_

#include <optional>
#include <span>
#include <utility>

#include <Eigen/Core>

#include "echoforge/types.h"

namespace echoforge {

// Highest spherical-harmonic order supported by EvalSH and the rotation code.
inline constexpr int kMaxShOrder = 4;

// Number of coefficients for an order-n expansion.
constexpr int ShCount(int order) { return (order + 1) * (order + 1); }

// ACN channel index.
constexpr int AcnIndex(int l, int m) { return l * l + l + m; }

// Real, orthonormal spherical-harmonic coefficients in ACN order.
//
// The phase convention includes the Condon-Shortley factor, so the first
// order block is Y(1,-1) = -c*y, Y(1,0) = c*z, Y(1,1) = -c*x with
// c = sqrt(3 / 4pi). DominantDirection() relies on this.
class SHVector {
 public:
  SHVector() : SHVector(0) {}
  explicit SHVector(int order);
  SHVector(int order, Eigen::VectorXd coeffs);

  static SHVector Zero(int order) { return SHVector(order); }

  int order() const { return order_; }
  int size() const { return static_cast<int>(coeffs_.size()); }

  double operator[](int acn) const { return coeffs_[acn]; }
  double& operator[](int acn) { return coeffs_[acn]; }
  double at(int l, int m) const { return coeffs_[AcnIndex(l, m)]; }

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  // Truncates or zero-pads to `order`.
  SHVector Resized(int order) const;

  // Value of the expansion in direction `d`.
  double Evaluate(const Vec3& d) const;

  bool IsFinite() const { return coeffs_.allFinite(); }

  SHVector& operator+=(const SHVector& o);
  SHVector& operator*=(double s) {
    coeffs_ *= s;
    return *this;
  }
  friend SHVector operator*(SHVector v, double s) { return v *= s; }
  friend SHVector operator*(double s, SHVector v) { return v *= s; }
  friend SHVector operator+(SHVector a, const SHVector& b) { return a += b; }

 private:
  int order_;
  Eigen::VectorXd coeffs_;
};

// Evaluates all real SH basis functions up to `order` (<= kMaxShOrder).
// Directions within 1e-3 of unit length are renormalized; anything else
// throws std::invalid_argument.
SHVector EvalSH(const Vec3& direction, int order);

// Writes the basis values into `out` (size ShCount(order)); no allocation.
// `direction` must already be unit length.
void EvalSHInto(const Vec3& direction, int order, std::span<double> out);

// Dominant direction of a distribution from its first order coefficients,
// normalize(-X(1,1), -X(1,-1), X(1,0)). Returns nullopt when the first
// order block has no energy (isotropic distribution).
std::optional<Vec3> DominantDirection(const SHVector& v);

// A direction sample with an associated real value.
struct DirectionalSample {
  Vec3 direction;
  double value;
};

// Discrete SH transform. If the directions form a t-design with
// t >= 2*order + 1 the equal-weight quadrature is used; otherwise the
// coefficients are a least-squares fit. Throws if there are fewer samples
// than coefficients.
SHVector ShTransform(std::span<const DirectionalSample> samples, int order);

// Same as ShTransform but for many value sets on one direction grid. Each
// column of `values` holds one function sampled on `directions`; the result
// has one coefficient column per input column.
Eigen::MatrixXd ShTransformMatrix(std::span<const Vec3> directions,
                                  const Eigen::MatrixXd& values, int order);

// Directional loudness matrix for a distribution given by its SH expansion.
// The distribution is sampled on a t-design as per-direction gains
// (negative values clamped to zero) and re-encoded, giving
//   D = (4pi / N) * sum_i g(d_i) Y(d_i) Y(d_i)^T.
Eigen::MatrixXd DirectionalLoudnessMatrix(const SHVector& distribution,
                                          int order);

class Rng;

// Per-axis rotation angles in radians.
struct AxisAngles {
  double x;
  double y;
  double z;
};

// Draws each axis angle uniformly from [90, 270] degrees.
AxisAngles DrawScatterAngles(Rng& rng);

// Rz(z) * Ry(y) * Rx(x).
Mat3 ComposeAxisRotations(const AxisAngles& angles);

// Feedback-path scatter rotation: ComposeAxisRotations(DrawScatterAngles()).
Mat3 RandomScatterRotation(Rng& rng);

}  // namespace echoforge

#endif  // ECHOFORGE_SH_H_
