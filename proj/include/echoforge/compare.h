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

#ifndef ECHOFORGE_COMPARE_H_
#define ECHOFORGE_COMPARE_H_

#include <array>

#include <nlohmann/json.hpp>

#include "echoforge/acoustic_metrics.h"

namespace echoforge {

struct CompareThresholds {
  double rt60_percent = 10.0;
  double c80_db = 1.5;
  double d50_points = 10.0;
  double g_db = 1.0;
  double ts_ms = 10.0;

  // Missing keys keep their defaults.
  static CompareThresholds FromJson(const nlohmann::json& j);
};

// Signed deltas, ours minus oracle. RT60 is relative to the oracle.
struct BandComparison {
  double rt60_percent = 0.0;
  double c80_db = 0.0;
  double d50_points = 0.0;
  double g_db = 0.0;
  double ts_ms = 0.0;
  bool rt60_pass = true;
  bool c80_pass = true;
  bool d50_pass = true;
  bool g_pass = true;
  bool ts_pass = true;

  bool pass() const {
    return rt60_pass && c80_pass && d50_pass && g_pass && ts_pass;
  }
};

struct ComparisonReport {
  std::array<BandComparison, kNumBands> bands;
  CompareThresholds thresholds;
  bool pass = true;

  nlohmann::json ToJson() const;
};

ComparisonReport CompareMetrics(const AcousticMetrics& ours,
                                const AcousticMetrics& oracle,
                                const CompareThresholds& thresholds = {});

// Accepts either a bare metrics object or a render metrics file, in which
// case summary.<role> is used ("ours" or "oracle").
AcousticMetrics ExtractMetrics(const nlohmann::json& document,
                               const char* role);

}  // namespace echoforge

#endif  // ECHOFORGE_COMPARE_H_
