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

#include "echoforge/compare.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "echoforge/json_io.h"

namespace echoforge {

CompareThresholds CompareThresholds::FromJson(const nlohmann::json& j) {
  CompareThresholds t;
  t.rt60_percent = j.value("rt60_percent", t.rt60_percent);
  t.c80_db = j.value("c80_db", t.c80_db);
  t.d50_points = j.value("d50_points", t.d50_points);
  t.g_db = j.value("g_db", t.g_db);
  t.ts_ms = j.value("ts_ms", t.ts_ms);
  return t;
}

nlohmann::json ComparisonReport::ToJson() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["thresholds"] = {{"rt60_percent", thresholds.rt60_percent},
                     {"c80_db", thresholds.c80_db},
                     {"d50_points", thresholds.d50_points},
                     {"g_db", thresholds.g_db},
                     {"ts_ms", thresholds.ts_ms}};
  j["bands"] = nlohmann::json::array();
  for (const BandComparison& b : bands) {
    j["bands"].push_back({{"rt60_percent", b.rt60_percent},
                          {"c80_db", b.c80_db},
                          {"d50_points", b.d50_points},
                          {"g_db", b.g_db},
                          {"ts_ms", b.ts_ms},
                          {"rt60_pass", b.rt60_pass},
                          {"c80_pass", b.c80_pass},
                          {"d50_pass", b.d50_pass},
                          {"g_pass", b.g_pass},
                          {"ts_pass", b.ts_pass},
                          {"pass", b.pass()}});
  }
  return j;
}

ComparisonReport CompareMetrics(const AcousticMetrics& ours,
                                const AcousticMetrics& oracle,
                                const CompareThresholds& thresholds) {
  ComparisonReport r;
  r.thresholds = thresholds;
  for (int b = 0; b < kNumBands; ++b) {
    BandComparison& c = r.bands[b];
    c.rt60_percent = oracle.rt60[b] > 0.0
                         ? 100.0 * (ours.rt60[b] - oracle.rt60[b]) /
                               oracle.rt60[b]
                         : (ours.rt60[b] == 0.0 ? 0.0 : INFINITY);
    c.c80_db = ours.c80[b] - oracle.c80[b];
    c.d50_points = 100.0 * (ours.d50[b] - oracle.d50[b]);
    c.g_db = ours.g[b] - oracle.g[b];
    c.ts_ms = 1000.0 * (ours.ts[b] - oracle.ts[b]);
    c.rt60_pass = std::abs(c.rt60_percent) <= thresholds.rt60_percent;
    c.c80_pass = std::abs(c.c80_db) <= thresholds.c80_db;
    c.d50_pass = std::abs(c.d50_points) <= thresholds.d50_points;
    c.g_pass = std::abs(c.g_db) <= thresholds.g_db;
    c.ts_pass = std::abs(c.ts_ms) <= thresholds.ts_ms;
    r.pass = r.pass && c.pass();
  }
  return r;
}

AcousticMetrics ExtractMetrics(const nlohmann::json& document,
                               const char* role) {
  if (document.contains("rt60")) return MetricsFromJson(document);
  if (document.contains("summary") && document["summary"].contains(role)) {
    return MetricsFromJson(document["summary"][role]);
  }
  throw std::invalid_argument(std::string("no '") + role +
                              "' metrics found in document");
}

}  // namespace echoforge
