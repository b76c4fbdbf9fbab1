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

#include "mfcpg/policy_gradient.h"

#include <stdexcept>
#include <string>
#include <vector>

#include "mfcpg/kernels.h"

namespace mfcpg {

ParticleArray MlpFeedback::Controls(double t, const TimeGrid& grid,
                                    const Ensemble& e) const {
  MlpTape tape;
  kernels::MlpForwardBatch(policy_, BuildFeatures(features_, t, grid, e), tape);
  if (tape.output().cols() != e.dim()) {
    throw std::invalid_argument("mlp feedback: output dimension does not match d");
  }
  return std::move(tape.activations.back());
}

CostAndGradient RolloutCostAndGrad(const MlpPolicy& policy, const Ensemble& e0,
                                   const TimeGrid& grid, const CsParams& p,
                                   const NoiseSource& noise) {
  ValidateCsParams(p);
  const FeatureSet features = FeaturesForBeta(p.beta);
  const int n = e0.size();
  const int d = e0.dim();
  if (d != p.d || policy.output_dim() != d ||
      policy.input_dim() != FeatureDim(features, d)) {
    throw std::invalid_argument("policy gradient: network shape does not match the feature set");
  }
  const int M = grid.M;
  const double h = grid.h;

  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(M + 1);
  traj.states.push_back(e0);
  std::vector<MlpTape> tapes(M);
  for (int m = 0; m < M; ++m) {
    const Ensemble& e = traj.states.back();
    kernels::MlpForwardBatch(policy, BuildFeatures(features, grid.nodes[m], grid, e),
                             tapes[m]);
    ParticleArray dw(n, d);
    noise.Increments(grid, m, dw);
    Ensemble next = CsEulerStep(e, tapes[m].output(), p, h, dw);
    traj.controls.push_back(tapes[m].output());
    traj.noise.push_back(std::move(dw));
    traj.states.push_back(std::move(next));
  }

  CostAndGradient result;
  result.cost = EmpiricalCsCost(traj, p.gamma1);

  const double inv_n = 1.0 / static_cast<double>(n);
  ParticleArray lam_x = ParticleArray::Zero(n, d);
  ParticleArray lam_v(n, d);
  {
    const Ensemble& last = traj.states[M];
    const Vector mean_v = ColumnMean(last.v);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) lam_v(i, c) = 2.0 * inv_n * (last.v(i, c) - mean_v[c]);
    }
  }

  std::vector<Vector> chunk_grads;
  ParticleArray grad_features;
  for (int m = M - 1; m >= 0; --m) {
    const Ensemble& e = traj.states[m];
    const ParticleArray& a = traj.controls[m];
    const Vector mean_v = ColumnMean(e.v);

    ParticleArray next_x = lam_x;
    ParticleArray next_v = lam_v + h * lam_x;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        next_v(i, c) += 2.0 * h * inv_n * (e.v(i, c) - mean_v[c]);
      }
    }
    kernels::InteractionAdjoint(e.x, e.v, lam_v, p.Phi, p.beta, h, next_x, next_v);

    const ParticleArray grad_a = (2.0 * h * p.gamma1 * inv_n) * a + h * lam_v;
    kernels::MlpBackwardBatch(policy, tapes[m], grad_a, chunk_grads, grad_features);
    next_v += grad_features.rightCols(d);
    if (features == FeatureSet::kTimePositionVelocity) {
      next_x += grad_features.middleCols(1, d);
    }
    if (!next_x.allFinite() || !next_v.allFinite()) {
      throw NumericalError("policy gradient: non-finite adjoint at step " +
                           std::to_string(m));
    }
    lam_x = std::move(next_x);
    lam_v = std::move(next_v);
  }
  result.grad = kernels::ReduceChunks(chunk_grads, policy.num_params());
  if (!result.grad.allFinite()) {
    throw NumericalError("policy gradient: non-finite parameter gradient");
  }
  return result;
}

CostAndGradient RolloutCostAndGrad(const MlpPolicy& policy, const Ensemble& e0,
                                   const TimeGrid& grid, const CsParams& p,
                                   uint64_t seed, uint32_t replica) {
  return RolloutCostAndGrad(policy, e0, grid, p, DirectNoise(seed, replica));
}

}  // namespace mfcpg
