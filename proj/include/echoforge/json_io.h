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

#ifndef ECHOFORGE_JSON_IO_H_
#define ECHOFORGE_JSON_IO_H_

#include <nlohmann/json.hpp>

#include "echoforge/acoustic_metrics.h"
#include "echoforge/ir_analysis.h"

namespace echoforge {

nlohmann::json ToJson(const BandArray& bands);
nlohmann::json ToJson(const SHVector& v);
nlohmann::json ToJson(const ReverbParams& params);
nlohmann::json ToJson(const AcousticMetrics& metrics);

// Reads {"rt60","c80","d50","g","ts"} arrays. Throws std::invalid_argument
// unless every array has exactly one entry per band.
AcousticMetrics MetricsFromJson(const nlohmann::json& j);

}  // namespace echoforge

#endif  // ECHOFORGE_JSON_IO_H_
