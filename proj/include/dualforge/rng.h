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

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dualforge::rng {

// FNV-1a over bytes; stable across platforms.
std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t SplitMix64(std::uint64_t x);
// Generator state for (seed, salt); the only keying scheme used for masks
// and mixture sampling.
std::uint64_t KeyFor(std::uint64_t seed, std::string_view salt);

// mt19937_64 output is fixed by the standard; the distributions are not, so
// bounded draws are done here.
class Generator {
 public:
  explicit Generator(std::uint64_t key) : engine_(key) {}

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound);

  // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t n,
                                                    std::size_t k);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dualforge::rng
