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

#include "echoforge/sh.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "echoforge/rng.h"
#include "echoforge/tdesign.h"

namespace echoforge {
namespace {

// sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!), times sqrt(2) for m > 0.
constexpr std::array<std::array<double, kMaxShOrder + 1>, kMaxShOrder + 1>
MakeNormalization() {
  std::array<std::array<double, kMaxShOrder + 1>, kMaxShOrder + 1> k{};
  for (int l = 0; l <= kMaxShOrder; ++l) {
    for (int m = 0; m <= l; ++m) {
      double ratio = 1.0;  // (l-m)!/(l+m)!
      for (int i = l - m + 1; i <= l + m; ++i) ratio /= i;
      k[l][m] = (2 * l + 1) / (4.0 * kPi) * ratio * (m > 0 ? 2.0 : 1.0);
    }
  }
  return k;
}

const auto kNormSquared = MakeNormalization();

double Norm(int l, int m) { return std::sqrt(kNormSquared[l][m]); }

}  // namespace

SHVector::SHVector(int order)
    : order_(order), coeffs_(Eigen::VectorXd::Zero(ShCount(order))) {
  if (order < 0) throw std::invalid_argument("SH order must be >= 0");
}

SHVector::SHVector(int order, Eigen::VectorXd coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
  if (order < 0 || coeffs_.size() != ShCount(order)) {
    throw std::invalid_argument("SH coefficient count does not match order");
  }
}

SHVector SHVector::Resized(int order) const {
  SHVector out(order);
  const int n = std::min(size(), out.size());
  out.coeffs_.head(n) = coeffs_.head(n);
  return out;
}

double SHVector::Evaluate(const Vec3& d) const {
  std::array<double, ShCount(kMaxShOrder)> y;
  const int n = std::min(order_, kMaxShOrder);
  EvalSHInto(d.normalized(), n, std::span<double>(y.data(), ShCount(n)));
  double sum = 0.0;
  for (int i = 0; i < ShCount(n); ++i) sum += coeffs_[i] * y[i];
  return sum;
}

SHVector& SHVector::operator+=(const SHVector& o) {
  if (o.order_ > order_) {
    *this = Resized(o.order_);
  }
  coeffs_.head(o.size()) += o.coeffs_;
  return *this;
}

void EvalSHInto(const Vec3& d, int order, std::span<double> out) {
  const double x = d.x();
  const double y = d.y();
  const double z = d.z();
  // Associated Legendre polynomials with the sin^m(theta) factor removed,
  // Condon-Shortley phase included: pm[l][m].
  double pm[kMaxShOrder + 1][kMaxShOrder + 1] = {};
  double diag = 1.0;
  for (int m = 0; m <= order; ++m) {
    pm[m][m] = diag;
    if (m + 1 <= order) pm[m + 1][m] = z * (2 * m + 1) * diag;
    for (int l = m + 2; l <= order; ++l) {
      pm[l][m] = ((2 * l - 1) * z * pm[l - 1][m] - (l + m - 1) * pm[l - 2][m]) /
                 (l - m);
    }
    diag *= -(2.0 * m + 1.0);
  }
  // cos(m phi) sin^m(theta) and sin(m phi) sin^m(theta) via (x + iy)^m.
  double cm[kMaxShOrder + 1];
  double sm[kMaxShOrder + 1];
  cm[0] = 1.0;
  sm[0] = 0.0;
  for (int m = 1; m <= order; ++m) {
    cm[m] = x * cm[m - 1] - y * sm[m - 1];
    sm[m] = x * sm[m - 1] + y * cm[m - 1];
  }
  for (int l = 0; l <= order; ++l) {
    out[AcnIndex(l, 0)] = Norm(l, 0) * pm[l][0];
    for (int m = 1; m <= l; ++m) {
      const double k = Norm(l, m) * pm[l][m];
      out[AcnIndex(l, m)] = k * cm[m];
      out[AcnIndex(l, -m)] = k * sm[m];
    }
  }
}

SHVector EvalSH(const Vec3& direction, int order) {
  if (order < 0 || order > kMaxShOrder) {
    throw std::invalid_argument("EvalSH: order " + std::to_string(order) +
                                " not supported");
  }
  const double norm = direction.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-3) {
    throw std::invalid_argument("EvalSH: direction is not unit length");
  }
  SHVector out(order);
  EvalSHInto(direction / norm, order,
             std::span<double>(out.coeffs().data(), out.size()));
  return out;
}

std::optional<Vec3> DominantDirection(const SHVector& v) {
  if (v.order() < 1) {
    throw std::invalid_argument("DominantDirection needs order >= 1");
  }
  const Vec3 d(-v.at(1, 1), -v.at(1, -1), v.at(1, 0));
  const double n = d.norm();
  if (!(n > 1e-12 * std::max(1.0, std::abs(v[0])))) return std::nullopt;
  return d / n;
}

namespace {

Eigen::MatrixXd BasisMatrix(std::span<const Vec3> directions, int order) {
  Eigen::MatrixXd y(directions.size(), ShCount(order));
  std::array<double, ShCount(kMaxShOrder)> row;
  for (size_t i = 0; i < directions.size(); ++i) {
    EvalSHInto(directions[i].normalized(), order,
               std::span<double>(row.data(), ShCount(order)));
    for (int j = 0; j < ShCount(order); ++j) y(i, j) = row[j];
  }
  return y;
}

}  // namespace

Eigen::MatrixXd ShTransformMatrix(std::span<const Vec3> directions,
                                  const Eigen::MatrixXd& values, int order) {
  if (order < 0 || order > kMaxShOrder) {
    throw std::invalid_argument("ShTransform: unsupported order");
  }
  const int count = ShCount(order);
  if (static_cast<int>(directions.size()) < count) {
    throw std::invalid_argument("ShTransform: need at least " +
                                std::to_string(count) + " samples");
  }
  if (values.rows() != static_cast<Eigen::Index>(directions.size())) {
    throw std::invalid_argument("ShTransform: value count mismatch");
  }
  const Eigen::MatrixXd y = BasisMatrix(directions, order);
  const double w = 4.0 * kPi / directions.size();
  const Eigen::MatrixXd gram = w * y.transpose() * y;
  if ((gram - Eigen::MatrixXd::Identity(count, count)).cwiseAbs().maxCoeff() <
      1e-10) {
    // Equal-weight quadrature is exact on a design of sufficient degree.
    return w * y.transpose() * values;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(y);
  if (qr.rank() < count) {
    throw std::invalid_argument("ShTransform: direction set is rank deficient");
  }
  return qr.solve(values);
}

SHVector ShTransform(std::span<const DirectionalSample> samples, int order) {
  std::vector<Vec3> dirs;
  Eigen::MatrixXd values(samples.size(), 1);
  dirs.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    dirs.push_back(samples[i].direction);
    values(i, 0) = samples[i].value;
  }
  return SHVector(order, ShTransformMatrix(dirs, values, order).col(0));
}

Eigen::MatrixXd DirectionalLoudnessMatrix(const SHVector& distribution,
                                          int order) {
  const TDesign& design = TDesignForOrder(order);
  const int count = ShCount(order);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(count, count);
  std::array<double, ShCount(kMaxShOrder)> y;
  for (const Vec3& dir : design.directions) {
    const double gain = std::max(0.0, distribution.Evaluate(dir));
    if (gain == 0.0) continue;
    EvalSHInto(dir, order, std::span<double>(y.data(), count));
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), count);
    d.noalias() += gain * yv * yv.transpose();
  }
  return d * (4.0 * kPi / design.directions.size());
}

AxisAngles DrawScatterAngles(Rng& rng) {
  constexpr double kLo = 0.5 * kPi;
  constexpr double kHi = 1.5 * kPi;
  AxisAngles a;
  a.x = rng.Uniform(kLo, kHi);
  a.y = rng.Uniform(kLo, kHi);
  a.z = rng.Uniform(kLo, kHi);
  return a;
}

Mat3 ComposeAxisRotations(const AxisAngles& a) {
  const Mat3 rx = Eigen::AngleAxisd(a.x, Vec3::UnitX()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(a.y, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rz = Eigen::AngleAxisd(a.z, Vec3::UnitZ()).toRotationMatrix();
  return rz * ry * rx;
}

Mat3 RandomScatterRotation(Rng& rng) {
  return ComposeAxisRotations(DrawScatterAngles(rng));
}

}  // namespace echoforge
