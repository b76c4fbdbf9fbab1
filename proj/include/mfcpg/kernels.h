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

#ifndef MFCPG_KERNELS_H_
#define MFCPG_KERNELS_H_

// Data-parallel inner loops of the particle simulation and its adjoint.
//
// mfcpg::kernels holds the OpenMP versions used everywhere in the library.
// Each output row is owned by one thread and every reduction runs over a
// fixed chunk decomposition, so results are bit-identical for any worker
// count. mfcpg::reference holds plain serial loops with the same contracts;
// they are kept for the tests and the benchmark.

#include <cmath>
#include <vector>

#include "mfcpg/core.h"
#include "mfcpg/mlp.h"
#include "mfcpg/random.h"

namespace mfcpg {

// Phi / (1 + |x' - x|^2)^beta as a function of s = 1 + |x' - x|^2.
inline double PairWeight(double Phi, double beta, double s) {
  if (beta == 0.0) return Phi;
  if (beta == 1.0) return Phi / s;
  return Phi / std::pow(s, beta);
}

// d PairWeight / ds.
inline double PairWeightSlope(double Phi, double beta, double s) {
  if (beta == 0.0) return 0.0;
  if (beta == 1.0) return -Phi / (s * s);
  return -beta * Phi / std::pow(s, beta + 1.0);
}

// Cached layer outputs of a batched forward pass: activations[0] is the
// input, activations[L] the network output.
struct MlpTape {
  std::vector<ParticleArray> activations;

  const ParticleArray& output() const { return activations.back(); }
};

namespace kernels {

// Rows per chunk for reductions and batched matrix products.
inline constexpr int kChunkRows = 256;

inline int NumChunks(Eigen::Index rows) {
  return static_cast<int>((rows + kChunkRows - 1) / kChunkRows);
}

// Interaction term of particle i:
//   (1/N) sum_j PairWeight(|x_j - x_i|) (v_j - v_i),
// reduced to Phi (mean_v - v_i) when beta = 0.
void InteractionAt(const ParticleArray& x, const ParticleArray& v,
                   const Vector& mean_v, Eigen::Index i, double Phi,
                   double beta, double* out);

// All rows of the interaction term. `out` is resized to N x d.
void InteractionDrift(const ParticleArray& x, const ParticleArray& v,
                      double Phi, double beta, ParticleArray& out);

// Adjoint of the map (x, v) -> h * Interaction(x, v) contracted with
// `lambda` (N x d). Adds d<lambda, h I>/dx to lambda_x and d/dv to lambda_v.
void InteractionAdjoint(const ParticleArray& x, const ParticleArray& v,
                        const ParticleArray& lambda, double Phi, double beta,
                        double h, ParticleArray& lambda_x,
                        ParticleArray& lambda_v);

// sqrt(h) Z for every (particle, component) of one step.
void FillIncrements(const SeededStream& stream, uint32_t replica, uint32_t step,
                    double h, ParticleArray& out);

// Batched forward pass over the rows of `input`; fills `tape`.
void MlpForwardBatch(const MlpPolicy& policy, const ParticleArray& input,
                     MlpTape& tape);

// Reverse pass for one batch. `grad_output` is dCost/d(output) (N x out).
// Parameter gradients are accumulated into chunk_grads[c] for chunk c
// (resized on first use); the caller sums them in chunk order. Writes
// dCost/d(input) to `grad_input`.
void MlpBackwardBatch(const MlpPolicy& policy, const MlpTape& tape,
                      const ParticleArray& grad_output,
                      std::vector<Vector>& chunk_grads,
                      ParticleArray& grad_input);

// Sum of chunk gradients in chunk order.
Vector ReduceChunks(const std::vector<Vector>& chunk_grads, Eigen::Index size);

}  // namespace kernels

namespace reference {

// O(N^2) double loop for every beta, including beta = 0.
void InteractionDrift(const ParticleArray& x, const ParticleArray& v,
                      double Phi, double beta, ParticleArray& out);

void InteractionAdjoint(const ParticleArray& x, const ParticleArray& v,
                        const ParticleArray& lambda, double Phi, double beta,
                        double h, ParticleArray& lambda_x,
                        ParticleArray& lambda_v);

void FillIncrements(const SeededStream& stream, uint32_t replica, uint32_t step,
                    double h, ParticleArray& out);

// Row-by-row MlpForward.
void MlpForwardBatch(const MlpPolicy& policy, const ParticleArray& input,
                     MlpTape& tape);

// Row-by-row scalar backpropagation; accumulates into `grad`.
void MlpBackwardBatch(const MlpPolicy& policy, const MlpTape& tape,
                      const ParticleArray& grad_output, Vector& grad,
                      ParticleArray& grad_input);

}  // namespace reference
}  // namespace mfcpg

#endif  // MFCPG_KERNELS_H_
