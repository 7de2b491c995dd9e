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

#ifndef ECHOFORGE_SH_ROTATION_H_
#define ECHOFORGE_SH_ROTATION_H_

#include <span>

#include <Eigen/Core>

#include "echoforge/sh.h"
#include "echoforge/types.h"

namespace echoforge {

// Rotation of real SH coefficients, block diagonal by degree l.
// For a rotation R, Apply(EvalSH(d)) == EvalSH(R * d).
class SHRotation {
 public:
  // Builds the matrix with the Ivanic-Ruedenberg recurrence. Throws
  // std::invalid_argument unless R is orthogonal with det +1 (1e-9).
  SHRotation(const Mat3& rotation, int order);

  static SHRotation Identity(int order) {
    return SHRotation(Mat3::Identity(), order);
  }

  int order() const { return order_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  SHVector Apply(const SHVector& v) const;

  // In-place rotation of `coeffs` (size ShCount(order)); uses the blocks
  // directly, no allocation.
  void ApplyInPlace(std::span<double> coeffs) const;

 private:
  int order_;
  Eigen::MatrixXd matrix_;
};

}  // namespace echoforge

#endif  // ECHOFORGE_SH_ROTATION_H_
