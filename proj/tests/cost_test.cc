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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "mfcpg/random.h"
#include "mfcpg/riccati.h"

namespace mfcpg {
namespace {

Trajectory SampleTrajectory(uint64_t seed, int n, int d, int M) {
  CsParams p;
  p.d = d;
  const SeededStream s(seed);
  const RiccatiSolution ric = SolveRiccati(ToLqParams(p));
  return Rollout(UniformEnsemble(s, 0, n, d), ExactLqPolicy(ric, p.gamma1),
                 MakeUniformGrid(0.0, 1.0, M), p, seed);
}

TEST(EmpiricalCsCostTest, ConsensusWithoutEffortCostsNothing) {
  Ensemble e(5, 2);
  e.v.rowwise() = Eigen::RowVector2d(1.0, -3.0);
  CsParams p;
  p.sigma = 0.0;
  p.d = 2;
  const Trajectory traj = Rollout(e, ZeroPolicy(), MakeUniformGrid(0.0, 1.0, 8), p, 1);
  const CostBreakdown c = EmpiricalCsCost(traj, 0.1);
  EXPECT_EQ(c.total, 0.0);
}

TEST(EmpiricalCsCostTest, TwoParticleHandValue) {
  Ensemble e(2, 1);
  e.v << 0, 1;
  CsParams p;
  p.Phi = 0.0;
  p.sigma = 0.0;
  const Trajectory traj = Rollout(e, ZeroPolicy(), MakeUniformGrid(0.0, 1.0, 1), p, 1);
  const CostBreakdown c = EmpiricalCsCost(traj, 0.1);
  EXPECT_EQ(c.running_state, 0.25);
  EXPECT_EQ(c.running_control, 0.0);
  EXPECT_EQ(c.terminal, 0.25);
  EXPECT_EQ(c.total, 0.5);
}

TEST(EmpiricalCsCostTest, LeftEndpointRule) {
  // Dispersion (m+1)^2 at node m, zero controls.
  const int M = 4;
  Trajectory traj;
  traj.grid = MakeUniformGrid(0.0, 1.0, M);
  for (int m = 0; m <= M; ++m) {
    Ensemble e(2, 1);
    e.v << -(m + 1.0), m + 1.0;
    traj.states.push_back(e);
    if (m < M) traj.controls.push_back(ParticleArray::Zero(2, 1));
  }
  const CostBreakdown c = EmpiricalCsCost(traj, 0.3);
  EXPECT_EQ(c.running_state, 0.25 * (1 + 4 + 9 + 16));
  EXPECT_EQ(c.terminal, 25.0);
}

TEST(EmpiricalCsCostTest, DecompositionIdentity) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const CostBreakdown c = EmpiricalCsCost(SampleTrajectory(seed, 30, 2, 8), 0.1);
    const double gap = c.total - (c.running_state + c.running_control + c.terminal);
    EXPECT_LE(std::abs(gap), 8 * std::numeric_limits<double>::epsilon() * c.total);
  }
}

TEST(EmpiricalCsCostTest, ExchangeabilityIsExactForReversal) {
  const Trajectory traj = SampleTrajectory(3, 16, 1, 8);
  Trajectory rev = traj;
  for (auto& e : rev.states) {
    e.x = e.x.colwise().reverse().eval();
    e.v = e.v.colwise().reverse().eval();
  }
  for (auto& a : rev.controls) a = a.colwise().reverse().eval();
  const CostBreakdown a = EmpiricalCsCost(traj, 0.1);
  const CostBreakdown b = EmpiricalCsCost(rev, 0.1);
  // Sums visit the same terms in a different order.
  EXPECT_NEAR(a.total, b.total, 4 * std::numeric_limits<double>::epsilon() * a.total);
}

TEST(EmpiricalCsCostTest, TranslationInvariance) {
  const Trajectory traj = SampleTrajectory(4, 40, 2, 8);
  Trajectory shifted = traj;
  for (auto& e : shifted.states) e.v.array() += 3.5;
  const CostBreakdown a = EmpiricalCsCost(traj, 0.1);
  const CostBreakdown b = EmpiricalCsCost(shifted, 0.1);
  EXPECT_NEAR(a.running_state, b.running_state, 1e-13);
  EXPECT_NEAR(a.terminal, b.terminal, 1e-13);
  EXPECT_EQ(a.running_control, b.running_control);
}

TEST(EmpiricalCsCostTest, ControlPenaltyIsQuadratic) {
  const Trajectory traj = SampleTrajectory(5, 20, 1, 8);
  const double base = EmpiricalCsCost(traj, 0.1).running_control;
  for (double c : {2.0, 0.5, -4.0}) {
    Trajectory scaled = traj;
    for (auto& a : scaled.controls) a *= c;
    EXPECT_EQ(EmpiricalCsCost(scaled, 0.1).running_control, c * c * base);
  }
  Trajectory scaled = traj;
  for (auto& a : scaled.controls) a *= 1.3;
  EXPECT_NEAR(EmpiricalCsCost(scaled, 0.1).running_control, 1.69 * base, 1e-15);
}

TEST(EmpiricalCsCostTest, DoublingPenaltyAddsControlEnergy) {
  const Trajectory traj = SampleTrajectory(6, 20, 2, 8);
  const double gamma1 = 0.1;
  double energy = 0.0;
  for (const auto& a : traj.controls) energy += traj.grid.h * a.squaredNorm() / 20.0;
  const double diff =
      EmpiricalCsCost(traj, 2 * gamma1).total - EmpiricalCsCost(traj, gamma1).total;
  EXPECT_NEAR(diff, gamma1 * energy, 1e-15);
}

TEST(EmpiricalCsCostTest, RejectsMalformedTrajectory) {
  Trajectory traj = SampleTrajectory(1, 4, 1, 2);
  traj.controls.pop_back();
  EXPECT_THROW(EmpiricalCsCost(traj, 0.1), std::invalid_argument);
}

GenericMfcProblem Objective(std::function<double(double)> f, double g) {
  GenericMfcProblem prob;
  prob.running_cost = [f](double t, const Vector&, const Vector&, const EmpiricalLaw&) {
    return f(t);
  };
  prob.terminal_cost = [g](const Vector&, const EmpiricalLaw&) { return g; };
  return prob;
}

TEST(GenericDiscreteCostTest, NullAndConstantObjectives) {
  for (int M : {1, 4, 10}) {
    const TimeGrid g = MakeUniformGrid(0.0, 1.0, M);
    std::vector<ParticleArray> states(M + 1, ParticleArray::Ones(3, 1));
    std::vector<ParticleArray> controls(M, ParticleArray::Ones(3, 1));
    EXPECT_EQ(GenericDiscreteCost(states, controls, g,
                                  Objective([](double) { return 0.0; }, 0.0)),
              0.0);
    EXPECT_NEAR(GenericDiscreteCost(states, controls, g,
                                    Objective([](double) { return 1.0; }, 0.0)),
                1.0, 1e-15);
  }
}

TEST(GenericDiscreteCostTest, LeftEndpointValues) {
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 4);
  std::vector<ParticleArray> states(5, ParticleArray::Zero(2, 1));
  std::vector<ParticleArray> controls(4, ParticleArray::Zero(2, 1));
  // f(t_i) = 4 t_i: 0.25 * (0 + 1 + 2 + 3) = 1.5; terminal 0.5.
  EXPECT_EQ(GenericDiscreteCost(states, controls, g,
                                Objective([](double t) { return 4 * t; }, 0.5)),
            2.0);
}

TEST(GenericDiscreteCostTest, CsInstanceMatchesEmpiricalCost) {
  const double gamma1 = 0.1;
  for (int d : {1, 2}) {
    const Trajectory traj = SampleTrajectory(7, 25, d, 8);
    std::vector<ParticleArray> states, controls;
    for (const auto& e : traj.states) {
      ParticleArray s(e.size(), 2 * d);
      s << e.x, e.v;
      states.push_back(s);
    }
    controls = traj.controls;
    GenericMfcProblem prob;
    prob.n = 2 * d;
    prob.k = d;
    prob.running_cost = [d, gamma1](double, const Vector& x, const Vector& a,
                                    const EmpiricalLaw& law) {
      return (x.tail(d) - law.mean_state.tail(d)).squaredNorm() + gamma1 * a.squaredNorm();
    };
    prob.terminal_cost = [d](const Vector& x, const EmpiricalLaw& law) {
      return (x.tail(d) - law.mean_state.tail(d)).squaredNorm();
    };
    const double generic = GenericDiscreteCost(states, controls, traj.grid, prob);
    const double direct = EmpiricalCsCost(traj, gamma1).total;
    EXPECT_NEAR(generic, direct, 1e-14 * direct);
  }
}

TEST(GenericDiscreteCostTest, NonFiniteCostThrows) {
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 2);
  std::vector<ParticleArray> states(3, ParticleArray::Zero(2, 1));
  std::vector<ParticleArray> controls(2, ParticleArray::Zero(2, 1));
  EXPECT_THROW(GenericDiscreteCost(states, controls, g,
                                   Objective([](double) { return std::nan(""); }, 0.0)),
               NumericalError);
  EXPECT_THROW(GenericDiscreteCost(states, controls, g,
                                   Objective([](double) { return 0.0; }, INFINITY)),
               NumericalError);
}

}  // namespace
}  // namespace mfcpg
