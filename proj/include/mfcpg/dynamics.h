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

#ifndef MFCPG_DYNAMICS_H_
#define MFCPG_DYNAMICS_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "mfcpg/core.h"
#include "mfcpg/generic_problem.h"
#include "mfcpg/random.h"
#include "mfcpg/riccati.h"

namespace mfcpg {

// Controlled stochastic Cucker-Smale model:
//   dx = v dt,  dv = (a + E[kappa(x, v, x', v')]) dt + sigma dW,
//   kappa = Phi (v' - v) / (1 + |x' - x|^2)^beta.
struct CsParams {
  double Phi = 1.0;
  double beta = 0.0;
  double sigma = 0.1;
  double gamma1 = 0.1;
  double T = 1.0;
  int d = 1;

  bool operator==(const CsParams&) const = default;
};

void ValidateCsParams(const CsParams& p);
LqParams ToLqParams(const CsParams& p, double var_v0 = 1.0 / 12.0);

Vector CsKernel(const Vector& x, const Vector& v, const Vector& xp,
                const Vector& vp, double Phi, double beta);

// a_i + (1/N) sum_j kappa(x_i, v_i, x_j, v_j). Throws std::out_of_range for a
// bad index.
Vector CsDrift(const Ensemble& e, int i, const Vector& a_i, const CsParams& p);

// Synchronous Euler-Maruyama step: x' = x + h v, v' = v + h drift + sigma dW,
// with all drifts taken from the pre-step ensemble. `noise` holds the dW.
Ensemble CsEulerStep(const Ensemble& e, const ParticleArray& controls,
                     const CsParams& p, double h, const ParticleArray& noise);

// X' = X + b h + sigma dW for every particle, coefficients evaluated against
// the empirical law of (X, controls). Throws NumericalError naming t and the
// particle if a coefficient is non-finite.
ParticleArray GenericEulerStep(const ParticleArray& states,
                               const ParticleArray& controls,
                               const GenericMfcProblem& prob, double t, double h,
                               const ParticleArray& noise);

// Policy inputs: (t/T, v) or (t/T, x, v), with t/T measured from the grid
// start.
enum class FeatureSet { kTimeVelocity, kTimePositionVelocity };

FeatureSet FeaturesForBeta(double beta);
int FeatureDim(FeatureSet features, int d);
ParticleArray BuildFeatures(FeatureSet features, double t, const TimeGrid& grid,
                            const Ensemble& e);

// Feedback control evaluated on the whole ensemble at a grid node; returns
// N x d.
class FeedbackPolicy {
 public:
  virtual ~FeedbackPolicy() = default;
  virtual ParticleArray Controls(double t, const TimeGrid& grid,
                                 const Ensemble& e) const = 0;
};

class ZeroPolicy final : public FeedbackPolicy {
 public:
  ParticleArray Controls(double, const TimeGrid&, const Ensemble& e) const override {
    return ParticleArray::Zero(e.size(), e.dim());
  }
};

// -(nu(t)/(2 gamma1)) (v_i - mean_v), held over each grid cell.
class ExactLqPolicy final : public FeedbackPolicy {
 public:
  ExactLqPolicy(const RiccatiSolution& ric, double gamma1)
      : ric_(ric), gamma1_(gamma1) {}
  ParticleArray Controls(double t, const TimeGrid& grid,
                         const Ensemble& e) const override;

 private:
  const RiccatiSolution& ric_;
  double gamma1_;
};

// Pointwise map from one particle's feature vector to its control.
class PointwisePolicy final : public FeedbackPolicy {
 public:
  using Map = std::function<Vector(const Vector& features)>;
  PointwisePolicy(FeatureSet features, Map map)
      : features_(features), map_(std::move(map)) {}
  ParticleArray Controls(double t, const TimeGrid& grid,
                         const Ensemble& e) const override;

 private:
  FeatureSet features_;
  Map map_;
};

// Source of the Brownian increments dW^i_m for a given grid.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void Increments(const TimeGrid& grid, int step, ParticleArray& out) const = 0;
};

// Independent N(0, h) draws tagged by (replica, particle, step, component).
class DirectNoise final : public NoiseSource {
 public:
  DirectNoise(uint64_t seed, uint32_t replica) : stream_(seed), replica_(replica) {}
  void Increments(const TimeGrid& grid, int step, ParticleArray& out) const override;

 private:
  SeededStream stream_;
  uint32_t replica_;
};

// Increments on a grid of M cells built from one Brownian path sampled on a
// fine grid of fine_M cells (fine_M / M a power of two). Each coarse
// increment is the pairwise-tree sum of its fine increments, so an M-cell
// increment equals, bit for bit, the sum of its two 2M-cell halves.
class RefinedNoise final : public NoiseSource {
 public:
  RefinedNoise(uint64_t seed, uint32_t replica, int fine_M);
  void Increments(const TimeGrid& grid, int step, ParticleArray& out) const override;

  int fine_M() const { return fine_M_; }

 private:
  double TreeSum(double fine_h, uint32_t i, uint32_t c, int first, int count) const;

  SeededStream stream_;
  uint32_t replica_;
  int fine_M_;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<Ensemble> states;         // M + 1
  std::vector<ParticleArray> controls;  // M, control on [t_m, t_{m+1})
  std::vector<ParticleArray> noise;     // M, the dW used on each cell
};

Trajectory Rollout(const Ensemble& e0, const FeedbackPolicy& policy,
                   const TimeGrid& grid, const CsParams& p,
                   const NoiseSource& noise);

// DirectNoise(seed, replica).
Trajectory Rollout(const Ensemble& e0, const FeedbackPolicy& policy,
                   const TimeGrid& grid, const CsParams& p, uint64_t seed,
                   uint32_t replica = 0);

}  // namespace mfcpg

#endif  // MFCPG_DYNAMICS_H_
