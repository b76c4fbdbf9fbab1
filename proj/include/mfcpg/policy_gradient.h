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

#ifndef MFCPG_POLICY_GRADIENT_H_
#define MFCPG_POLICY_GRADIENT_H_

#include <cstdint>

#include "mfcpg/cost.h"
#include "mfcpg/dynamics.h"
#include "mfcpg/mlp.h"

namespace mfcpg {

// Feedback given by an MLP on the features implied by beta.
class MlpFeedback final : public FeedbackPolicy {
 public:
  MlpFeedback(const MlpPolicy& policy, FeatureSet features)
      : policy_(policy), features_(features) {}
  ParticleArray Controls(double t, const TimeGrid& grid,
                         const Ensemble& e) const override;

 private:
  const MlpPolicy& policy_;
  FeatureSet features_;
};

struct CostAndGradient {
  CostBreakdown cost;
  Vector grad;  // laid out like MlpPolicy::params()
};

// Empirical cost of the rollout driven by `policy` and its exact pathwise
// gradient with respect to every network parameter, noise held fixed.
//
// The adjoint sweep runs backward over the Euler recursion. With lambda the
// adjoint of (x, v) at node m+1, the adjoint at node m collects
//   - the identity and x += h v paths,
//   - the interaction term through every particle pair (positions enter
//     through the pair weights when beta > 0),
//   - the running dispersion cost, including its empirical mean,
//   - the control, through the network back to its x and v features.
// Throws NumericalError naming the first step with a non-finite adjoint.
CostAndGradient RolloutCostAndGrad(const MlpPolicy& policy, const Ensemble& e0,
                                   const TimeGrid& grid, const CsParams& p,
                                   const NoiseSource& noise);

CostAndGradient RolloutCostAndGrad(const MlpPolicy& policy, const Ensemble& e0,
                                   const TimeGrid& grid, const CsParams& p,
                                   uint64_t seed, uint32_t replica = 0);

}  // namespace mfcpg

#endif  // MFCPG_POLICY_GRADIENT_H_
