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

#include <gtest/gtest.h>

#include "echoforge/json_io.h"

namespace echoforge {
namespace {

AcousticMetrics Sample() {
  AcousticMetrics m;
  m.rt60 = {1.0, 1.1, 0.9, 0.7};
  m.c80 = {3.0, 2.5, 2.0, 4.0};
  m.d50 = {0.5, 0.45, 0.4, 0.6};
  m.g = {12.0, 11.0, 10.0, 9.0};
  m.ts = {0.07, 0.08, 0.09, 0.06};
  return m;
}

TEST(CompareTest, IdenticalInputsPass) {
  const ComparisonReport r = CompareMetrics(Sample(), Sample());
  EXPECT_TRUE(r.pass);
  for (const BandComparison& b : r.bands) {
    EXPECT_EQ(b.rt60_percent, 0.0);
    EXPECT_EQ(b.c80_db, 0.0);
    EXPECT_EQ(b.d50_points, 0.0);
    EXPECT_EQ(b.g_db, 0.0);
    EXPECT_EQ(b.ts_ms, 0.0);
  }
}

TEST(CompareTest, ArithmeticExamples) {
  AcousticMetrics ours = Sample(), oracle = Sample();
  ours.rt60[0] = 1.08;
  const ComparisonReport a = CompareMetrics(ours, oracle);
  EXPECT_NEAR(a.bands[0].rt60_percent, 8.0, 1e-9);
  EXPECT_TRUE(a.bands[0].rt60_pass);
  EXPECT_TRUE(a.pass);

  ours = Sample();
  ours.c80[2] = 3.0;
  oracle.c80[2] = 5.0;
  const ComparisonReport b = CompareMetrics(ours, oracle);
  EXPECT_NEAR(b.bands[2].c80_db, -2.0, 1e-12);
  EXPECT_FALSE(b.bands[2].c80_pass);
  EXPECT_FALSE(b.pass);

  ours = oracle = Sample();
  ours.d50[1] = 0.30;
  ours.ts[3] = 0.075;
  ours.g[0] = 13.5;
  const ComparisonReport c = CompareMetrics(ours, oracle);
  EXPECT_NEAR(c.bands[1].d50_points, -15.0, 1e-9);
  EXPECT_FALSE(c.bands[1].d50_pass);
  EXPECT_NEAR(c.bands[3].ts_ms, 15.0, 1e-9);
  EXPECT_FALSE(c.bands[3].ts_pass);
  EXPECT_NEAR(c.bands[0].g_db, 1.5, 1e-12);
  EXPECT_FALSE(c.bands[0].g_pass);
}

TEST(CompareTest, CustomThresholds) {
  AcousticMetrics ours = Sample();
  ours.rt60[0] = 1.08;
  const CompareThresholds t =
      CompareThresholds::FromJson({{"rt60_percent", 5.0}});
  EXPECT_EQ(t.c80_db, 1.5);
  EXPECT_FALSE(CompareMetrics(ours, Sample(), t).pass);
  const nlohmann::json report = CompareMetrics(ours, Sample(), t).ToJson();
  EXPECT_FALSE(report.at("pass").get<bool>());
}

TEST(CompareTest, ExtractsFromSummaryOrBareObjects) {
  const nlohmann::json bare = ToJson(Sample());
  const AcousticMetrics a = ExtractMetrics(bare, "ours");
  EXPECT_EQ(a.rt60, Sample().rt60);
  nlohmann::json doc;
  doc["summary"]["oracle"] = bare;
  const AcousticMetrics b = ExtractMetrics(doc, "oracle");
  EXPECT_EQ(b.ts, Sample().ts);
  EXPECT_THROW(ExtractMetrics(doc, "ours"), std::exception);
}

TEST(CompareTest, BandCountMismatchIsRejected) {
  nlohmann::json bad = ToJson(Sample());
  bad["rt60"] = {1.0, 2.0, 3.0};
  EXPECT_THROW(ExtractMetrics(bad, "ours"), std::invalid_argument);
}

}  // namespace
}  // namespace echoforge
