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

#ifndef ECHOFORGE_TDESIGN_H_
#define ECHOFORGE_TDESIGN_H_

#include <span>
#include <vector>

#include "echoforge/types.h"

namespace echoforge {

// Spherical t-design: equal-weight quadrature on these directions is exact
// for polynomials of degree <= `degree`.
struct TDesign {
  int degree;
  std::vector<Vec3> directions;
};

// Embedded designs: degree 3 (6 points), 5 (12), 9 (48) and 21 (240).
std::span<const TDesign> EmbeddedTDesigns();

// Smallest embedded design with degree >= `min_degree`. Throws
// std::invalid_argument if none is large enough.
const TDesign& TDesignForDegree(int min_degree);

// Design suitable for an order-n SH transform (degree >= 2n + 1).
inline const TDesign& TDesignForOrder(int order) {
  return TDesignForDegree(2 * order + 1);
}

}  // namespace echoforge

#endif  // ECHOFORGE_TDESIGN_H_
