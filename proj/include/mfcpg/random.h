// Copyright 2026 The mfcpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MFCPG_RANDOM_H_
#define MFCPG_RANDOM_H_

#include <array>
#include <cstdint>

#include "mfcpg/core.h"

namespace mfcpg {

// Philox4x32-10 block function (Salmon et al., SC'11). Counter-based: the
// output depends only on (counter, key), so variates can be drawn in any
// order and on any thread.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

enum class Purpose : uint8_t {
  kInitialPosition = 1,
  kInitialVelocity = 2,
  kBrownian = 3,
  kWeightInit = 4,
  kTest = 5,
  kCoordinateSample = 6,
};

// Identifies one variate. `component` must fit in 24 bits.
struct StreamTag {
  Purpose purpose = Purpose::kTest;
  uint32_t replica = 0;
  uint32_t particle = 0;
  uint32_t step = 0;
  uint32_t component = 0;
};

class SeededStream {
 public:
  explicit SeededStream(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform(const StreamTag& tag) const;
  // Standard normal via Box-Muller on two open-interval uniforms taken from
  // the same Philox block (cosine branch only).
  double Normal(const StreamTag& tag) const;

 private:
  std::array<uint32_t, 4> Block(const StreamTag& tag) const;

  uint64_t seed_;
};

// sqrt(h) * Z for components base.component .. base.component + d - 1.
// Throws std::invalid_argument when h < 0.
Vector GaussianIncrement(const SeededStream& stream, StreamTag base, double h,
                         int d);

// x, v i.i.d. uniform on [0,1)^d.
Ensemble UniformEnsemble(const SeededStream& stream, uint32_t replica, int n,
                         int d);

}  // namespace mfcpg

#endif  // MFCPG_RANDOM_H_
