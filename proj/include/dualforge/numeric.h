// Copyright 2026 The DualForge Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <cmath>
#include <cstddef>

namespace dualforge {

// Products like 0.15 * 20 land a few ulps off the integer; snap within this
// distance before rounding.
inline constexpr double kRoundingSnap = 1e-9;

inline std::size_t CeilCount(double x) {
  const double nearest = std::nearbyint(x);
  if (std::fabs(x - nearest) < kRoundingSnap) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(x));
}

// Round half to even.
inline std::size_t RoundCount(double x) {
  const double floor_x = std::floor(x);
  const double frac = x - floor_x;
  if (std::fabs(frac - 0.5) < kRoundingSnap) {
    const auto lo = static_cast<std::size_t>(floor_x);
    return lo % 2 == 0 ? lo : lo + 1;
  }
  return static_cast<std::size_t>(frac < 0.5 ? floor_x : floor_x + 1);
}

}  // namespace dualforge
