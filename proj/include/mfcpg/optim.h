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

#ifndef MFCPG_OPTIM_H_
#define MFCPG_OPTIM_H_

#include <cstdint>

#include "mfcpg/core.h"

namespace mfcpg {

struct AdamState {
  Vector m;
  Vector v;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(Eigen::Index size)
      : m(Vector::Zero(size)), v(Vector::Zero(size)) {}
};

// Bias-corrected Adam update of `theta` in place.
void AdamStep(Vector& theta, const Vector& grad, AdamState& state, double lr);

// Step decay: lr0 * decay^floor(epoch / period).
struct LrSchedule {
  double lr0 = 1e-3;
  double decay = 0.617;
  int period = 50;

  bool operator==(const LrSchedule&) const = default;
};

void ValidateLrSchedule(const LrSchedule& s);
double LearningRate(const LrSchedule& s, int epoch);

}  // namespace mfcpg

#endif  // MFCPG_OPTIM_H_
