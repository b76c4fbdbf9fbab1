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

#include "mfcpg/optim.h"

#include <cmath>
#include <stdexcept>

namespace mfcpg {

void AdamStep(Vector& theta, const Vector& grad, AdamState& state, double lr) {
  if (grad.size() != theta.size()) {
    throw std::invalid_argument("adam: gradient and parameter sizes differ");
  }
  if (state.m.size() != theta.size()) {
    state.m = Vector::Zero(theta.size());
    state.v = Vector::Zero(theta.size());
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

void ValidateLrSchedule(const LrSchedule& s) {
  if (!(s.lr0 > 0.0)) throw std::invalid_argument("lr0 must be > 0");
  if (!(s.decay > 0.0 && s.decay <= 1.0)) {
    throw std::invalid_argument("decay must lie in (0, 1]");
  }
  if (s.period < 1) throw std::invalid_argument("period must be >= 1");
}

double LearningRate(const LrSchedule& s, int epoch) {
  if (epoch < 0) throw std::invalid_argument("learning rate: negative epoch");
  return s.lr0 * std::pow(s.decay, epoch / s.period);
}

}  // namespace mfcpg
