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

#ifndef MFCPG_COST_H_
#define MFCPG_COST_H_

#include <vector>

#include "mfcpg/core.h"
#include "mfcpg/dynamics.h"
#include "mfcpg/generic_problem.h"

namespace mfcpg {

struct CostBreakdown {
  double total = 0.0;
  double running_state = 0.0;    // sum_m h (1/N) sum_i |v_i - mean v|^2
  double running_control = 0.0;  // sum_m h gamma1 (1/N) sum_i |a_i|^2
  double terminal = 0.0;         // (1/N) sum_i |v_i(T) - mean v(T)|^2
};

// (1/N) sum_i |v_i - mean_v|^2 at one node.
double VelocityDispersion(const Ensemble& e);
// (1/N) sum_i |a_i|^2.
double MeanSquaredControl(const ParticleArray& controls);

// Empirical Cucker-Smale objective of a trajectory. Running terms use the
// left endpoint of each cell (m = 0..M-1); the terminal term uses the
// terminal-node empirical mean.
CostBreakdown EmpiricalCsCost(const Trajectory& traj, double gamma1);

// sum_i h f(t_i, X_i, a_i, law_i) + g(X_M, law_M), with the expectation over
// particles taken as the empirical average.
double GenericDiscreteCost(const std::vector<ParticleArray>& states,
                           const std::vector<ParticleArray>& controls,
                           const TimeGrid& grid, const GenericMfcProblem& prob);

}  // namespace mfcpg

#endif  // MFCPG_COST_H_
