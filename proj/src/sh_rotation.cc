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

#include "echoforge/sh_rotation.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace echoforge {
namespace {

// Rotation blocks in the real SH basis without the Condon-Shortley phase,
// where the l = 1 functions are proportional to (y, z, x). The recurrence
// follows Ivanic & Ruedenberg (1996) including their 1998 corrections.
class IvanicBlocks {
 public:
  IvanicBlocks(const Mat3& r, int order) : blocks_(order + 1) {
    blocks_[0] = Eigen::MatrixXd::Ones(1, 1);
    if (order == 0) return;
    // Axis permutation x,y,z -> index 2,0,1 of the l = 1 block.
    const int perm[3] = {1, 2, 0};
    Eigen::MatrixXd b1(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) b1(i, j) = r(perm[i], perm[j]);
    }
    blocks_[1] = b1;
    for (int l = 2; l <= order; ++l) {
      Eigen::MatrixXd bl(2 * l + 1, 2 * l + 1);
      for (int m = -l; m <= l; ++m) {
        for (int n = -l; n <= l; ++n) bl(m + l, n + l) = Element(l, m, n);
      }
      blocks_[l] = bl;
    }
  }

  const Eigen::MatrixXd& block(int l) const { return blocks_[l]; }

 private:
  double R1(int i, int j) const { return blocks_[1](i + 1, j + 1); }
  double Prev(int l, int m, int n) const {
    return blocks_[l - 1](m + l - 1, n + l - 1);
  }

  double P(int i, int l, int a, int b) const {
    if (b == l) {
      return R1(i, 1) * Prev(l, a, l - 1) - R1(i, -1) * Prev(l, a, -l + 1);
    }
    if (b == -l) {
      return R1(i, 1) * Prev(l, a, -l + 1) + R1(i, -1) * Prev(l, a, l - 1);
    }
    return R1(i, 0) * Prev(l, a, b);
  }

  double Element(int l, int m, int n) const {
    const int am = std::abs(m);
    const double denom = (std::abs(n) == l) ? (2.0 * l) * (2.0 * l - 1.0)
                                            : double(l + n) * double(l - n);
    const bool m0 = (m == 0);
    const double u = std::sqrt(double(l + m) * double(l - m) / denom);
    const double v = 0.5 *
                     std::sqrt((1.0 + m0) * double(l + am - 1) *
                               double(l + am) / denom) *
                     (1.0 - 2.0 * m0);
    const double w =
        -0.5 * std::sqrt(double(l - am - 1) * double(l - am) / denom) *
        (1.0 - m0);
    double result = 0.0;
    if (u != 0.0) result += u * P(0, l, m, n);
    if (v != 0.0) result += v * V(l, m, n);
    if (w != 0.0) result += w * W(l, m, n);
    return result;
  }

  double V(int l, int m, int n) const {
    if (m == 0) return P(1, l, 1, n) + P(-1, l, -1, n);
    if (m > 0) {
      const bool d1 = (m == 1);
      return P(1, l, m - 1, n) * std::sqrt(1.0 + d1) -
             P(-1, l, -m + 1, n) * (1.0 - d1);
    }
    const bool d1 = (m == -1);
    return P(1, l, m + 1, n) * (1.0 - d1) +
           P(-1, l, -m - 1, n) * std::sqrt(1.0 + d1);
  }

  double W(int l, int m, int n) const {
    if (m > 0) return P(1, l, m + 1, n) + P(-1, l, -m - 1, n);
    return P(1, l, m - 1, n) - P(-1, l, -m + 1, n);
  }

  std::vector<Eigen::MatrixXd> blocks_;
};

}  // namespace

SHRotation::SHRotation(const Mat3& rotation, int order) : order_(order) {
  if (order < 0 || order > kMaxShOrder) {
    throw std::invalid_argument("SHRotation: unsupported order");
  }
  if (!rotation.allFinite() ||
      (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() >
          1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("SHRotation: matrix is not a proper rotation");
  }
  const IvanicBlocks blocks(rotation, order);
  const int count = ShCount(order);
  matrix_ = Eigen::MatrixXd::Zero(count, count);
  for (int l = 0; l <= order; ++l) {
    const Eigen::MatrixXd& b = blocks.block(l);
    // Switch to the Condon-Shortley phase used by EvalSH: Y' = (-1)^m Y.
    for (int m = -l; m <= l; ++m) {
      for (int n = -l; n <= l; ++n) {
        const double sign = ((std::abs(m) + std::abs(n)) % 2) ? -1.0 : 1.0;
        matrix_(AcnIndex(l, m), AcnIndex(l, n)) = sign * b(m + l, n + l);
      }
    }
  }
}

SHVector SHRotation::Apply(const SHVector& v) const {
  if (v.order() > order_) {
    throw std::invalid_argument("SHRotation::Apply: vector order too high");
  }
  const int n = v.size();
  return SHVector(v.order(), matrix_.topLeftCorner(n, n) * v.coeffs());
}

void SHRotation::ApplyInPlace(std::span<double> coeffs) const {
  std::array<double, 2 * kMaxShOrder + 1> tmp;
  const int max_l = std::min<int>(order_, static_cast<int>(std::sqrt(
                                              double(coeffs.size()))) - 1);
  for (int l = 1; l <= max_l; ++l) {
    const int base = l * l;
    const int width = 2 * l + 1;
    for (int i = 0; i < width; ++i) {
      double acc = 0.0;
      for (int j = 0; j < width; ++j) {
        acc += matrix_(base + i, base + j) * coeffs[base + j];
      }
      tmp[i] = acc;
    }
    for (int i = 0; i < width; ++i) coeffs[base + i] = tmp[i];
  }
}

}  // namespace echoforge
