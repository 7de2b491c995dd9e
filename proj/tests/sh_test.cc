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

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "echoforge/rng.h"
#include "echoforge/tdesign.h"
#include "test_util.h"

namespace echoforge {
namespace {

using testing::Legendre;
using testing::RandomUnit;

// Cartesian closed forms of the real orthonormal harmonics up to degree 2,
// Condon-Shortley phase included.
std::vector<double> ClosedFormUpTo2(const Vec3& d) {
  const double x = d.x(), y = d.y(), z = d.z();
  const double c1 = std::sqrt(3.0 / (4.0 * kPi));
  const double c2 = 0.5 * std::sqrt(15.0 / kPi);
  return {0.5 / std::sqrt(kPi),
          -c1 * y,
          c1 * z,
          -c1 * x,
          c2 * x * y,
          -c2 * y * z,
          0.25 * std::sqrt(5.0 / kPi) * (3.0 * z * z - 1.0),
          -c2 * x * z,
          0.5 * c2 * (x * x - y * y)};
}

TEST(ShTest, MatchesCartesianClosedFormsToDegreeTwo) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 d = RandomUnit(gen);
    const SHVector y = EvalSH(d, 2);
    const std::vector<double> expected = ClosedFormUpTo2(d);
    for (int k = 0; k < 9; ++k) EXPECT_NEAR(y[k], expected[k], 1e-12) << k;
  }
}

TEST(ShTest, PoleValuesAreCentered) {
  const SHVector y = EvalSH(Vec3::UnitZ(), 3);
  for (int l = 0; l <= 3; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double expected =
          m == 0 ? std::sqrt((2 * l + 1) / (4.0 * kPi)) : 0.0;
      EXPECT_NEAR(y.at(l, m), expected, 1e-12);
    }
  }
}

TEST(ShTest, AdditionTheoremHoldsToOrderFour) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = RandomUnit(gen), b = RandomUnit(gen);
    const SHVector ya = EvalSH(a, 4), yb = EvalSH(b, 4);
    for (int l = 0; l <= 4; ++l) {
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) sum += ya.at(l, m) * yb.at(l, m);
      EXPECT_NEAR(sum, (2 * l + 1) / (4.0 * kPi) * Legendre(l, a.dot(b)),
                  1e-12);
    }
  }
}

// Gauss-Legendre in cos(theta) times a uniform azimuth grid integrates
// band-limited products exactly.
TEST(ShTest, OrthonormalUnderProductQuadrature) {
  const int nz = 12, nphi = 24;
  std::vector<double> nodes(nz), weights(nz);
  for (int i = 0; i < nz; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (nz + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double p = Legendre(nz, x);
      const double dp = nz * (x * p - Legendre(nz - 1, x)) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double dp = nz * (x * Legendre(nz, x) - Legendre(nz - 1, x)) /
                      (x * x - 1.0);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  const int n = ShCount(4);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < nz; ++i) {
    const double r = std::sqrt(1.0 - nodes[i] * nodes[i]);
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * kPi * j / nphi;
      const Vec3 d(r * std::cos(phi), r * std::sin(phi), nodes[i]);
      const Eigen::VectorXd y = EvalSH(d, 4).coeffs();
      gram += weights[i] * (2.0 * kPi / nphi) * y * y.transpose();
    }
  }
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(ShTest, RejectsBadInput) {
  EXPECT_THROW(EvalSH(Vec3(2.0, 0.0, 0.0), 1), std::invalid_argument);
  EXPECT_THROW(EvalSH(Vec3::UnitX(), 5), std::invalid_argument);
  EXPECT_NO_THROW(EvalSH(Vec3(1.0005, 0.0, 0.0), 1));
}

TEST(ShTest, DominantDirectionRecoversEncodedDirection) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 50; ++i) {
    const Vec3 d = RandomUnit(gen);
    const auto found = DominantDirection(EvalSH(d, 2) * 3.0);
    ASSERT_TRUE(found.has_value());
    EXPECT_LT((*found - d).norm(), 1e-12);
  }
  SHVector iso(1);
  iso[0] = 1.0;
  EXPECT_FALSE(DominantDirection(iso).has_value());
}

TEST(ShTest, TransformRoundTripOnDesign) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int order = 0; order <= 4; ++order) {
    SHVector f(order);
    for (int k = 0; k < f.size(); ++k) f[k] = n(gen);
    std::vector<DirectionalSample> samples;
    for (const Vec3& d : TDesignForOrder(order).directions) {
      samples.push_back({d, f.Evaluate(d)});
    }
    const SHVector g = ShTransform(samples, order);
    EXPECT_LT((g.coeffs() - f.coeffs()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ShTest, TransformLeastSquaresOnIrregularGrid) {
  std::mt19937_64 gen(5);
  SHVector f(2);
  for (int k = 0; k < f.size(); ++k) f[k] = 0.1 * (k + 1);
  std::vector<DirectionalSample> samples;
  for (int i = 0; i < 40; ++i) {
    const Vec3 d = RandomUnit(gen);
    samples.push_back({d, f.Evaluate(d)});
  }
  const SHVector g = ShTransform(samples, 2);
  EXPECT_LT((g.coeffs() - f.coeffs()).cwiseAbs().maxCoeff(), 1e-10);
  samples.resize(5);
  EXPECT_THROW(ShTransform(samples, 2), std::invalid_argument);
}

TEST(ShTest, LoudnessMatrixOfUniformGainIsIdentity) {
  SHVector uniform(1);
  uniform[0] = 2.0 * std::sqrt(kPi);  // g(x) = 1 everywhere
  const Eigen::MatrixXd d = DirectionalLoudnessMatrix(uniform, 1);
  EXPECT_LT((d - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(ShTest, LoudnessMatrixIsSymmetricPositiveSemidefinite) {
  SHVector dist = EvalSH(Vec3(0.3, -0.2, 0.9).normalized(), 1);
  dist[0] += 0.5;
  const Eigen::MatrixXd d = DirectionalLoudnessMatrix(dist, 1);
  EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
}

TEST(ShTest, ScatterRotationsStayInRange) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const AxisAngles a = DrawScatterAngles(rng);
    for (double v : {a.x, a.y, a.z}) {
      EXPECT_GE(v, kPi / 2.0);
      EXPECT_LE(v, 1.5 * kPi);
    }
    const Mat3 r = ComposeAxisRotations(a);
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace echoforge
