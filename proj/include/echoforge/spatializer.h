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

#ifndef ECHOFORGE_SPATIALIZER_H_
#define ECHOFORGE_SPATIALIZER_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "echoforge/sh.h"
#include "echoforge/types.h"

namespace echoforge {

// Head frame: +x forward, +y left, +z up.
struct HrtfMeasurement {
  Vec3 direction;
  std::vector<double> left;
  std::vector<double> right;
};

inline constexpr int kMaxHrtfTaps = 512;

// HRTF projected onto real SH: one FIR per ear and ACN channel.
class HrtfSH {
 public:
  HrtfSH() = default;
  HrtfSH(int order, double sample_rate, Eigen::MatrixXd left,
         Eigen::MatrixXd right);

  // Tikhonov-regularized least-squares fit per tap. `lambda` is relative to
  // the largest singular value of the direction basis matrix. Throws
  // std::invalid_argument when there are too few directions, the tap counts
  // disagree, or the direction set is rank deficient (the message reports
  // the condition number).
  static HrtfSH Project(std::span<const HrtfMeasurement> measurements,
                        int order, double sample_rate, double lambda = 1e-6);

  int order() const { return order_; }
  int channels() const { return ShCount(order_); }
  int taps() const { return static_cast<int>(left_.cols()); }
  double sample_rate() const { return sample_rate_; }

  // Rows are ACN channels, columns taps.
  const Eigen::MatrixXd& left() const { return left_; }
  const Eigen::MatrixXd& right() const { return right_; }

  // Coefficients for a rotated head: J(rotation) applied to every tap.
  HrtfSH Rotated(const Mat3& rotation) const;

 private:
  int order_ = 0;
  double sample_rate_ = 44100.0;
  Eigen::MatrixXd left_;
  Eigen::MatrixXd right_;
};

// Synthetic head model: a delayed unit impulse per ear with a spherical-head
// interaural time difference and a lateral level difference, sampled on the
// 240-point design.
std::vector<HrtfMeasurement> SyntheticSphereHrtf(double sample_rate,
                                                 int taps = 64);

// Streaming HRTF renderer: per ear, the sum over SH channels of the channel
// signal convolved with the (rotated) HRTF channel filter. Always performs
// exactly 2 * (n + 1)^2 convolutions.
class BinauralSpatializer {
 public:
  explicit BinauralSpatializer(HrtfSH hrtf);

  // Recomputes the rotated filters; call at block boundaries.
  void SetListenerRotation(const Mat3& rotation);

  // `q` is frames x channels (frame-major) with `q_channels` per frame;
  // channels beyond the HRTF order are ignored and missing ones count as
  // zero. `out` receives frames x 2.
  void Process(std::span<const double> q, int q_channels,
               std::span<double> out);

  int convolution_count() const { return 2 * hrtf_.channels(); }
  const HrtfSH& hrtf() const { return hrtf_; }
  const HrtfSH& rotated() const { return rotated_; }
  void Reset();

 private:
  HrtfSH hrtf_;
  HrtfSH rotated_;
  // Per channel input history, newest last, length taps - 1.
  std::vector<std::vector<double>> history_;
  std::vector<double> work_;
};

struct Speaker {
  std::string name;
  double azimuth_deg = 0.0;    // counter-clockwise from +x toward +y
  double elevation_deg = 0.0;
  Vec3 Direction() const;
};

// Per-speaker panning functions in the SH domain.
struct PanningSH {
  std::vector<Speaker> speakers;
  std::vector<SHVector> functions;
  int order = 0;
};

// Builds panning functions for a layout. Horizontal layouts use pairwise
// vector-base amplitude panning between azimuth neighbours; other layouts
// use normalized cardioid-power lobes. The gain functions are sampled on the
// 240-point design, clamped to be non-negative and projected to `order`.
PanningSH MakePanning(std::vector<Speaker> speakers, int order);

// Speaker gains for a source direction (before SH projection).
std::vector<double> PanningGains(std::span<const Speaker> speakers,
                                 const Vec3& direction);

class PanningSpatializer {
 public:
  explicit PanningSpatializer(PanningSH panning);

  void SetListenerRotation(const Mat3& rotation);

  // Per speaker channel: sum over ACN of q * (J(R) A). `out` is
  // frames x speakers.
  void Process(std::span<const double> q, int q_channels,
               std::span<double> out) const;

  int channels() const { return static_cast<int>(panning_.functions.size()); }
  int convolution_count() const { return 0; }

 private:
  PanningSH panning_;
  Eigen::MatrixXd rotated_;  // speakers x channels
};

}  // namespace echoforge

#endif  // ECHOFORGE_SPATIALIZER_H_
