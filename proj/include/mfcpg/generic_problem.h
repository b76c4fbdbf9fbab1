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

#ifndef MFCPG_GENERIC_PROBLEM_H_
#define MFCPG_GENERIC_PROBLEM_H_

#include <functional>

#include <Eigen/Core>

#include "mfcpg/core.h"

namespace mfcpg {

// Empirical joint law of (state, control) carried as the full sample arrays
// plus their means. `controls` is null for the terminal law of X alone.
struct EmpiricalLaw {
  const ParticleArray* states = nullptr;
  const ParticleArray* controls = nullptr;
  Vector mean_state;
  Vector mean_control;

  int size() const { return static_cast<int>(states->rows()); }
};

EmpiricalLaw MakeEmpiricalLaw(const ParticleArray& states,
                              const ParticleArray* controls);

// Coefficients (b, sigma, f, g) of an extended mean-field control problem with
// n-dimensional state, k-dimensional control and d-dimensional noise.
struct GenericMfcProblem {
  using Drift = std::function<Vector(double t, const Vector& x, const Vector& a,
                                     const EmpiricalLaw& law)>;
  using Diffusion = std::function<Eigen::MatrixXd(
      double t, const Vector& x, const Vector& a, const EmpiricalLaw& law)>;
  using RunningCost = std::function<double(double t, const Vector& x,
                                           const Vector& a,
                                           const EmpiricalLaw& law)>;
  using TerminalCost =
      std::function<double(const Vector& x, const EmpiricalLaw& law)>;

  int n = 1;
  int k = 1;
  int d = 1;
  Drift drift;
  Diffusion diffusion;
  RunningCost running_cost;
  TerminalCost terminal_cost;
};

}  // namespace mfcpg

#endif  // MFCPG_GENERIC_PROBLEM_H_
