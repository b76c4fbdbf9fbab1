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

#include "mfcpg/riccati.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfcpg {

void ValidateLqParams(const LqParams& p) {
  if (!(p.gamma1 > 0.0)) {
    throw std::invalid_argument("riccati: gamma1 must be > 0");
  }
  if (!(p.T > 0.0)) throw std::invalid_argument("riccati: T must be > 0");
  if (p.d < 1) throw std::invalid_argument("riccati: d must be >= 1");
  if (!(p.var_v0 >= 0.0)) {
    throw std::invalid_argument("riccati: var_v0 must be >= 0");
  }
  if (!(p.Phi >= 0.0)) throw std::invalid_argument("riccati: Phi must be >= 0");
}

double RiccatiSolution::Rhs(double n) const {
  return 2.0 * Phi * n + n * n / (2.0 * gamma1) - 2.0;
}

double RiccatiSolution::At(double t) const {
  if (!(t >= grid.t0 && t <= grid.T)) {
    throw std::invalid_argument("riccati: time " + std::to_string(t) +
                                " outside the solution grid");
  }
  if (t == grid.T) return nu.back();
  const double s = (t - grid.t0) / grid.h;
  int i = static_cast<int>(s);
  if (i >= grid.M) i = grid.M - 1;
  const double w = (t - grid.nodes[i]) / grid.h;
  return (1.0 - w) * nu[i] + w * nu[i + 1];
}

RiccatiSolution SolveRiccati(const LqParams& p, int steps) {
  ValidateLqParams(p);
  if (steps < 1) throw std::invalid_argument("riccati: steps must be >= 1");
  RiccatiSolution sol;
  sol.grid = MakeUniformGrid(0.0, p.T, steps);
  sol.Phi = p.Phi;
  sol.gamma1 = p.gamma1;
  sol.nu.assign(steps + 1, 0.0);
  sol.nu[steps] = 2.0;
  const double h = -sol.grid.h;
  for (int i = steps; i > 0; --i) {
    const double y = sol.nu[i];
    const double k1 = sol.Rhs(y);
    const double k2 = sol.Rhs(y + 0.5 * h * k1);
    const double k3 = sol.Rhs(y + 0.5 * h * k2);
    const double k4 = sol.Rhs(y + h * k3);
    const double next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next)) {
      throw NumericalError("riccati: blow-up at t = " +
                           std::to_string(sol.grid.nodes[i - 1]));
    }
    sol.nu[i - 1] = next;
  }
  return sol;
}

Vector ExactLqFeedback(double t, const Vector& v, const Vector& mean_v,
                       const RiccatiSolution& ric, double gamma1) {
  if (!(gamma1 > 0.0)) {
    throw std::invalid_argument("lq feedback: gamma1 must be > 0");
  }
  const double gain = ric.At(t) / (2.0 * gamma1);
  return -gain * (v - mean_v);
}

double ExactLqValue(const LqParams& p, const RiccatiSolution& ric) {
  ValidateLqParams(p);
  if (ric.nu.size() != ric.grid.nodes.size() || ric.nu.size() < 2 ||
      ric.Phi != p.Phi || ric.gamma1 != p.gamma1 || ric.grid.T != p.T) {
    throw std::invalid_argument("lq value: Riccati solution does not match parameters");
  }
  double integral = 0.0;
  for (int i = 0; i < ric.grid.M; ++i) {
    integral += 0.5 * ric.grid.h * (ric.nu[i] + ric.nu[i + 1]);
  }
  return p.d * (0.5 * ric.nu[0] * p.var_v0 + 0.5 * p.sigma * p.sigma * integral);
}

}  // namespace mfcpg
