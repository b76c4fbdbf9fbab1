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

#ifndef MFCPG_RICCATI_H_
#define MFCPG_RICCATI_H_

#include <vector>

#include "mfcpg/core.h"

namespace mfcpg {

// Linear-quadratic Cucker-Smale benchmark (beta = 0): dv = (a + Phi(E v - v))dt
// + sigma dW with running cost |v - E v|^2 + gamma1 |a|^2 and terminal cost
// |v_T - E v_T|^2, applied independently to each of the d components.
struct LqParams {
  double Phi = 1.0;
  double gamma1 = 0.1;
  double sigma = 0.1;
  double T = 1.0;
  int d = 1;
  // Per-component variance of the initial velocity; 1/12 for U[0,1).
  double var_v0 = 1.0 / 12.0;
};

void ValidateLqParams(const LqParams& p);

// nu on a uniform grid of [0, T], solving
//   nu' = 2 Phi nu + nu^2 / (2 gamma1) - 2,  nu(T) = 2.
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<double> nu;
  double Phi = 0.0;
  double gamma1 = 0.0;

  // Linear interpolation; throws std::invalid_argument outside [0, T].
  double At(double t) const;
  // d nu / dt from the ODE right-hand side.
  double Rhs(double nu_value) const;
};

inline constexpr int kDefaultRiccatiSteps = 4096;

// Classical RK4, fixed step, integrated backward from nu(T) = 2.
RiccatiSolution SolveRiccati(const LqParams& p, int steps = kDefaultRiccatiSteps);

// -(nu(t) / (2 gamma1)) (v - mean_v).
Vector ExactLqFeedback(double t, const Vector& v, const Vector& mean_v,
                       const RiccatiSolution& ric, double gamma1);

// d * [nu(0)/2 * var_v0 + sigma^2/2 * int_0^T nu dt], trapezoid quadrature on
// the Riccati grid. This is the mean-field optimal cost under ExactLqFeedback.
double ExactLqValue(const LqParams& p, const RiccatiSolution& ric);

}  // namespace mfcpg

#endif  // MFCPG_RICCATI_H_
