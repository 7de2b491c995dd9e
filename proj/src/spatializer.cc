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

#include "echoforge/spatializer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "echoforge/sh_rotation.h"
#include "echoforge/tdesign.h"

namespace echoforge {
namespace {

// Spherical-head radius used by the synthetic HRTF.
constexpr double kHeadRadius = 0.0875;
// Interaural level difference at 90 degrees, in dB.
constexpr double kMaxIldDb = 10.0;

Eigen::MatrixXd BasisMatrix(std::span<const Vec3> dirs, int order) {
  Eigen::MatrixXd y(dirs.size(), ShCount(order));
  for (size_t i = 0; i < dirs.size(); ++i) {
    y.row(i) = EvalSH(dirs[i], order).coeffs().transpose();
  }
  return y;
}

// Per-degree weights whose kernel is non-negative on the sphere.
std::vector<double> InPhaseWeights(int order) {
  std::vector<double> w(order + 1);
  for (int l = 0; l <= order; ++l) {
    // N!(N+1)! / ((N+l+1)!(N-l)!)
    w[l] = std::exp(std::lgamma(order + 1.0) + std::lgamma(order + 2.0) -
                    std::lgamma(order + l + 2.0) -
                    std::lgamma(order - l + 1.0));
  }
  return w;
}

}  // namespace

HrtfSH::HrtfSH(int order, double sample_rate, Eigen::MatrixXd left,
               Eigen::MatrixXd right)
    : order_(order),
      sample_rate_(sample_rate),
      left_(std::move(left)),
      right_(std::move(right)) {
  if (order < 0 || order > kMaxShOrder) {
    throw std::invalid_argument("HRTF order out of range");
  }
  if (left_.rows() != ShCount(order) || right_.rows() != ShCount(order) ||
      left_.cols() != right_.cols()) {
    throw std::invalid_argument("HRTF coefficient shape mismatch");
  }
  if (left_.cols() < 1 || left_.cols() > kMaxHrtfTaps) {
    throw std::invalid_argument("HRTF tap count must be in [1, 512]");
  }
  if (!left_.allFinite() || !right_.allFinite()) {
    throw std::invalid_argument("HRTF coefficients must be finite");
  }
}

HrtfSH HrtfSH::Project(std::span<const HrtfMeasurement> measurements,
                       int order, double sample_rate, double lambda) {
  const int channels = ShCount(order);
  if (static_cast<int>(measurements.size()) < channels) {
    throw std::invalid_argument("HRTF projection to order " +
                                std::to_string(order) + " needs at least " +
                                std::to_string(channels) + " directions");
  }
  const size_t taps = measurements[0].left.size();
  std::vector<Vec3> dirs;
  for (const HrtfMeasurement& m : measurements) {
    if (m.left.size() != taps || m.right.size() != taps) {
      throw std::invalid_argument("HRTF measurements differ in tap count");
    }
    dirs.push_back(m.direction.normalized());
  }
  const Eigen::MatrixXd y = BasisMatrix(dirs, order);
  const Eigen::MatrixXd gram = y.transpose() * y;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double max_ev = eig.eigenvalues().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  if (!(min_ev > 1e-10 * max_ev)) {
    std::ostringstream msg;
    msg << "HRTF direction set is rank deficient for order " << order
        << " (condition number "
        << (min_ev > 0.0 ? max_ev / min_ev
                         : std::numeric_limits<double>::infinity())
        << ")";
    throw std::invalid_argument(msg.str());
  }
  // Ridge term (lambda * sigma_max)^2 on the normal equations.
  const Eigen::MatrixXd reg =
      gram + lambda * lambda * max_ev *
                 Eigen::MatrixXd::Identity(channels, channels);
  const Eigen::LDLT<Eigen::MatrixXd> solver(reg);

  Eigen::MatrixXd values_l(dirs.size(), taps), values_r(dirs.size(), taps);
  for (size_t i = 0; i < dirs.size(); ++i) {
    for (size_t t = 0; t < taps; ++t) {
      values_l(i, t) = measurements[i].left[t];
      values_r(i, t) = measurements[i].right[t];
    }
  }
  Eigen::MatrixXd left = solver.solve(y.transpose() * values_l);
  Eigen::MatrixXd right = solver.solve(y.transpose() * values_r);
  return HrtfSH(order, sample_rate, std::move(left), std::move(right));
}

HrtfSH HrtfSH::Rotated(const Mat3& rotation) const {
  const SHRotation j(rotation, order_);
  return HrtfSH(order_, sample_rate_, j.matrix() * left_, j.matrix() * right_);
}

std::vector<HrtfMeasurement> SyntheticSphereHrtf(double sample_rate,
                                                 int taps) {
  const TDesign& grid = TDesignForDegree(21);
  std::vector<HrtfMeasurement> out;
  const double center = taps / 2.0;
  auto impulse = [&](double delay, double gain) {
    std::vector<double> h(taps, 0.0);
    const int i0 = static_cast<int>(std::floor(delay));
    const double frac = delay - i0;
    if (i0 >= 0 && i0 < taps) h[i0] += gain * (1.0 - frac);
    if (i0 + 1 >= 0 && i0 + 1 < taps) h[i0 + 1] += gain * frac;
    return h;
  };
  for (const Vec3& d : grid.directions) {
    const double lateral = std::clamp(d.y(), -1.0, 1.0);
    const double theta = std::asin(lateral);
    const double itd = kHeadRadius / kDefaultSpeedOfSound *
                       (theta + std::sin(theta)) * sample_rate;
    const double ild = std::pow(10.0, kMaxIldDb * lateral / 40.0);
    HrtfMeasurement m;
    m.direction = d;
    m.left = impulse(center - itd / 2.0, ild);
    m.right = impulse(center + itd / 2.0, 1.0 / ild);
    out.push_back(std::move(m));
  }
  return out;
}

BinauralSpatializer::BinauralSpatializer(HrtfSH hrtf)
    : hrtf_(std::move(hrtf)), rotated_(hrtf_) {
  Reset();
}

void BinauralSpatializer::SetListenerRotation(const Mat3& rotation) {
  rotated_ = hrtf_.Rotated(rotation);
}

void BinauralSpatializer::Reset() {
  history_.assign(hrtf_.channels(),
                  std::vector<double>(std::max(hrtf_.taps() - 1, 0), 0.0));
}

void BinauralSpatializer::Process(std::span<const double> q, int q_channels,
                                  std::span<double> out) {
  const int channels = hrtf_.channels();
  const int taps = hrtf_.taps();
  const size_t frames = q.size() / q_channels;
  std::fill(out.begin(), out.begin() + 2 * frames, 0.0);
  const int hist = taps - 1;
  work_.resize(hist + frames);
  for (int c = 0; c < channels; ++c) {
    std::copy(history_[c].begin(), history_[c].end(), work_.begin());
    for (size_t n = 0; n < frames; ++n) {
      work_[hist + n] = c < q_channels ? q[n * q_channels + c] : 0.0;
    }
    const double* hl = rotated_.left().row(c).data();
    const double* hr = rotated_.right().row(c).data();
    const int stride = static_cast<int>(rotated_.left().outerStride());
    for (size_t n = 0; n < frames; ++n) {
      double yl = 0.0, yr = 0.0;
      const double* x = &work_[hist + n];
      for (int k = 0; k < taps; ++k) {
        const double v = *(x - k);
        yl += hl[k * stride] * v;
        yr += hr[k * stride] * v;
      }
      out[2 * n] += yl;
      out[2 * n + 1] += yr;
    }
    std::copy(work_.end() - hist, work_.end(), history_[c].begin());
  }
}

Vec3 Speaker::Direction() const {
  const double az = azimuth_deg * kPi / 180.0;
  const double el = elevation_deg * kPi / 180.0;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
          std::sin(el)};
}

std::vector<double> PanningGains(std::span<const Speaker> speakers,
                                 const Vec3& direction) {
  const size_t n = speakers.size();
  std::vector<double> g(n, 0.0);
  if (n == 0) return g;
  if (n == 1) {
    g[0] = 1.0;
    return g;
  }
  const bool horizontal =
      std::all_of(speakers.begin(), speakers.end(),
                  [](const Speaker& s) { return s.elevation_deg == 0.0; });
  if (!horizontal) {
    double norm = 0.0;
    for (size_t s = 0; s < n; ++s) {
      const double c = (1.0 + speakers[s].Direction().dot(direction)) / 2.0;
      g[s] = c * c;
      norm += g[s] * g[s];
    }
    if (norm > 0.0) {
      for (double& v : g) v /= std::sqrt(norm);
    }
    return g;
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto wrap = [](double deg) {
    deg = std::fmod(deg, 360.0);
    return deg < 0.0 ? deg + 360.0 : deg;
  };
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return wrap(speakers[a].azimuth_deg) < wrap(speakers[b].azimuth_deg);
  });
  const Eigen::Vector2d p(direction.x(), direction.y());
  if (p.norm() < 1e-12) {
    for (double& v : g) v = 1.0 / std::sqrt(static_cast<double>(n));
    return g;
  }
  for (size_t k = 0; k < n; ++k) {
    const size_t a = order[k];
    const size_t b = order[(k + 1) % n];
    const Vec3 da = speakers[a].Direction();
    const Vec3 db = speakers[b].Direction();
    Eigen::Matrix2d base;
    base << da.x(), db.x(), da.y(), db.y();
    if (std::abs(base.determinant()) < 1e-12) continue;
    const Eigen::Vector2d w = base.inverse() * p;
    if (w[0] >= -1e-12 && w[1] >= -1e-12) {
      const double norm = w.norm();
      g[a] += std::max(w[0], 0.0) / norm;
      g[b] += std::max(w[1], 0.0) / norm;
      return g;
    }
  }
  // No enclosing pair (speakers span less than a half plane): nearest one.
  size_t best = 0;
  for (size_t s = 1; s < n; ++s) {
    if (speakers[s].Direction().dot(direction) >
        speakers[best].Direction().dot(direction)) {
      best = s;
    }
  }
  g[best] = 1.0;
  return g;
}

PanningSH MakePanning(std::vector<Speaker> speakers, int order) {
  if (speakers.empty()) throw std::invalid_argument("empty speaker layout");
  const TDesign& grid = TDesignForDegree(21);
  Eigen::MatrixXd values(grid.directions.size(), speakers.size());
  for (size_t i = 0; i < grid.directions.size(); ++i) {
    const std::vector<double> g = PanningGains(speakers, grid.directions[i]);
    for (size_t s = 0; s < speakers.size(); ++s) {
      values(i, s) = std::max(g[s], 0.0);
    }
  }
  const Eigen::MatrixXd coeffs =
      ShTransformMatrix(grid.directions, values, order);
  const std::vector<double> w = InPhaseWeights(order);
  PanningSH out;
  out.order = order;
  for (size_t s = 0; s < speakers.size(); ++s) {
    SHVector a(order);
    for (int l = 0; l <= order; ++l) {
      for (int m = -l; m <= l; ++m) {
        a[AcnIndex(l, m)] = w[l] * coeffs(AcnIndex(l, m), s);
      }
    }
    out.functions.push_back(a);
  }
  out.speakers = std::move(speakers);
  return out;
}

PanningSpatializer::PanningSpatializer(PanningSH panning)
    : panning_(std::move(panning)) {
  SetListenerRotation(Mat3::Identity());
}

void PanningSpatializer::SetListenerRotation(const Mat3& rotation) {
  const SHRotation j(rotation, panning_.order);
  rotated_.resize(panning_.functions.size(), ShCount(panning_.order));
  for (size_t s = 0; s < panning_.functions.size(); ++s) {
    rotated_.row(s) = (j.matrix() * panning_.functions[s].coeffs()).transpose();
  }
}

void PanningSpatializer::Process(std::span<const double> q, int q_channels,
                                 std::span<double> out) const {
  const size_t frames = q.size() / q_channels;
  const int speakers = static_cast<int>(rotated_.rows());
  const int channels =
      std::min(q_channels, static_cast<int>(rotated_.cols()));
  for (size_t n = 0; n < frames; ++n) {
    for (int s = 0; s < speakers; ++s) {
      double acc = 0.0;
      for (int c = 0; c < channels; ++c) {
        acc += q[n * q_channels + c] * rotated_(s, c);
      }
      out[n * speakers + s] = acc;
    }
  }
}

}  // namespace echoforge
