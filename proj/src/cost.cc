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

#include "mfcpg/cost.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfcpg {

double VelocityDispersion(const Ensemble& e) {
  return ComputeEmpiricalMoments(e).var_v;
}

double MeanSquaredControl(const ParticleArray& controls) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < controls.rows(); ++i) {
    for (Eigen::Index c = 0; c < controls.cols(); ++c) {
      acc += controls(i, c) * controls(i, c);
    }
  }
  return acc / static_cast<double>(controls.rows());
}

CostBreakdown EmpiricalCsCost(const Trajectory& traj, double gamma1) {
  const int M = traj.grid.M;
  if (static_cast<int>(traj.states.size()) != M + 1 ||
      static_cast<int>(traj.controls.size()) != M) {
    throw std::invalid_argument("cost: malformed trajectory");
  }
  const double h = traj.grid.h;
  CostBreakdown cost;
  for (int m = 0; m < M; ++m) {
    cost.running_state += h * VelocityDispersion(traj.states[m]);
    cost.running_control += h * gamma1 * MeanSquaredControl(traj.controls[m]);
  }
  cost.terminal = VelocityDispersion(traj.states[M]);
  cost.total = cost.running_state + cost.running_control + cost.terminal;
  return cost;
}

double GenericDiscreteCost(const std::vector<ParticleArray>& states,
                           const std::vector<ParticleArray>& controls,
                           const TimeGrid& grid, const GenericMfcProblem& prob) {
  const int M = grid.M;
  if (static_cast<int>(states.size()) != M + 1 ||
      static_cast<int>(controls.size()) != M) {
    throw std::invalid_argument("generic cost: expected M+1 states and M controls");
  }
  double total = 0.0;
  for (int m = 0; m < M; ++m) {
    const EmpiricalLaw law = MakeEmpiricalLaw(states[m], &controls[m]);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < states[m].rows(); ++i) {
      const double f = prob.running_cost(grid.nodes[m], states[m].row(i).transpose(),
                                         controls[m].row(i).transpose(), law);
      if (!std::isfinite(f)) {
        throw NumericalError("generic cost: non-finite running cost at t = " +
                             std::to_string(grid.nodes[m]) + ", particle " +
                             std::to_string(i));
      }
      acc += f;
    }
    total += grid.h * (acc / static_cast<double>(states[m].rows()));
  }
  const EmpiricalLaw terminal_law = MakeEmpiricalLaw(states[M], nullptr);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < states[M].rows(); ++i) {
    const double g = prob.terminal_cost(states[M].row(i).transpose(), terminal_law);
    if (!std::isfinite(g)) {
      throw NumericalError("generic cost: non-finite terminal cost, particle " +
                           std::to_string(i));
    }
    acc += g;
  }
  return total + acc / static_cast<double>(states[M].rows());
}

}  // namespace mfcpg
