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

#include "mfcpg/dynamics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mfcpg/kernels.h"
#include "mfcpg/random.h"

namespace mfcpg {
namespace {

Vector Vec(std::initializer_list<double> values) {
  Vector v(values.size());
  std::copy(values.begin(), values.end(), v.data());
  return v;
}

CsParams Params(double beta, double sigma = 0.0, int d = 1) {
  CsParams p;
  p.beta = beta;
  p.sigma = sigma;
  p.d = d;
  return p;
}

ParticleArray Noise(uint64_t seed, int n, int d, double h) {
  ParticleArray dw(n, d);
  DirectNoise(seed, 0).Increments(MakeUniformGrid(0.0, 1.0, 1), 0, dw);
  return dw * std::sqrt(h);
}

TEST(CsKernelTest, EqualVelocitiesGiveZero) {
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    EXPECT_EQ(CsKernel(Vec({0.1, 2}), Vec({3, 4}), Vec({-5, 1}), Vec({3, 4}), 1.0, beta),
              Vector::Zero(2));
  }
}

TEST(CsKernelTest, HandValues) {
  EXPECT_DOUBLE_EQ(CsKernel(Vec({0}), Vec({0.2}), Vec({7}), Vec({0.5}), 1.0, 0.0)[0], 0.3);
  EXPECT_EQ(CsKernel(Vec({0}), Vec({0}), Vec({1}), Vec({1}), 1.0, 1.0)[0], 0.5);
  EXPECT_DOUBLE_EQ(CsKernel(Vec({0}), Vec({0}), Vec({1}), Vec({1}), 1.0, 0.5)[0],
                   1.0 / std::sqrt(2.0));
}

TEST(CsDriftTest, SingleParticleDriftIsControl) {
  Ensemble e(1, 2);
  e.v << 0.3, -0.4;
  for (double beta : {0.0, 1.0}) {
    EXPECT_EQ(CsDrift(e, 0, Vec({1.5, 2.5}), Params(beta, 0.0, 2)), Vec({1.5, 2.5}));
  }
}

TEST(CsDriftTest, TwoParticles) {
  Ensemble e(2, 1);
  e.v << 0, 1;
  const Vector a = Vector::Zero(1);
  EXPECT_EQ(CsDrift(e, 0, a, Params(0.0))[0], 0.5);
  EXPECT_EQ(CsDrift(e, 1, a, Params(0.0))[0], -0.5);
}

TEST(CsDriftTest, FlockedStateDriftIsControl) {
  const SeededStream s(4);
  Ensemble e = UniformEnsemble(s, 0, 9, 2);
  e.v.rowwise() = Eigen::RowVector2d(0.25, -1.0);
  for (double beta : {0.0, 1.0, 1.5}) {
    for (int i = 0; i < 9; ++i) {
      EXPECT_EQ(CsDrift(e, i, Vec({0.1, 0.2}), Params(beta, 0.0, 2)), Vec({0.1, 0.2}));
    }
  }
}

TEST(CsDriftTest, BadIndexThrows) {
  Ensemble e(3, 1);
  EXPECT_THROW(CsDrift(e, 3, Vector::Zero(1), Params(0.0)), std::out_of_range);
  EXPECT_THROW(CsDrift(e, -1, Vector::Zero(1), Params(0.0)), std::out_of_range);
}

TEST(CsEulerStepTest, FreeStreaming) {
  Ensemble e(1, 1);
  e.v << 1;
  const Ensemble out = CsEulerStep(e, ParticleArray::Zero(1, 1), Params(0.0), 0.5,
                                   ParticleArray::Zero(1, 1));
  EXPECT_EQ(out.x(0, 0), 0.5);
  EXPECT_EQ(out.v(0, 0), 1.0);
}

TEST(CsEulerStepTest, TwoParticleHandValues) {
  Ensemble e(2, 1);
  e.v << 0, 1;
  const Ensemble out = CsEulerStep(e, ParticleArray::Zero(2, 1), Params(0.0), 0.1,
                                   ParticleArray::Zero(2, 1));
  EXPECT_DOUBLE_EQ(out.v(0, 0), 0.05);
  EXPECT_DOUBLE_EQ(out.v(1, 0), 0.95);
  EXPECT_EQ(out.x(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.x(1, 0), 0.1);
}

TEST(CsEulerStepTest, ConsensusIsInvariant) {
  const SeededStream s(8);
  Ensemble e = UniformEnsemble(s, 0, 12, 3);
  e.v.rowwise() = Eigen::RowVector3d(0.5, 0.25, -2.0);
  for (double beta : {0.0, 1.0}) {
    const Ensemble out = CsEulerStep(e, ParticleArray::Zero(12, 3), Params(beta, 0.3, 3),
                                     0.125, ParticleArray::Zero(12, 3));
    EXPECT_EQ(out.v, e.v);
    EXPECT_EQ(out.x, (e.x + 0.125 * e.v).eval());
  }
}

TEST(CsEulerStepTest, RejectsShapeMismatch) {
  Ensemble e(3, 1);
  EXPECT_THROW(CsEulerStep(e, ParticleArray::Zero(2, 1), Params(0.0), 0.1,
                           ParticleArray::Zero(3, 1)),
               std::invalid_argument);
  EXPECT_THROW(CsEulerStep(e, ParticleArray::Zero(3, 1), Params(0.0), 0.0,
                           ParticleArray::Zero(3, 1)),
               std::invalid_argument);
}

TEST(CsEulerStepTest, MeanVelocityIsConserved) {
  const SeededStream s(21);
  for (double beta : {0.0, 1.0}) {
    for (uint32_t r = 0; r < 5; ++r) {
      const Ensemble e = UniformEnsemble(s, r, 50, 2);
      const CsParams p = Params(beta, 0.1, 2);
      const ParticleArray dw = Noise(r, 50, 2, 0.01);
      const Ensemble out = CsEulerStep(e, ParticleArray::Zero(50, 2), p, 0.01, dw);
      const Vector drift_free =
          ColumnMean(e.v) + p.sigma * ColumnMean(dw);
      const Vector after = ColumnMean(out.v);
      for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(after[c], drift_free[c], 1e-12 * std::abs(drift_free[c]))
            << "beta=" << beta;
      }
    }
  }
}

TEST(CsEulerStepTest, PermutationEquivariance) {
  const SeededStream s(5);
  const int n = 31, d = 2;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 7, perm.end());
  for (double beta : {0.0, 1.0}) {
    const Ensemble e = UniformEnsemble(s, 0, n, d);
    const ParticleArray a = Noise(99, n, d, 1.0);
    const ParticleArray dw = Noise(7, n, d, 0.01);
    Ensemble pe(n, d);
    ParticleArray pa(n, d), pdw(n, d);
    for (int i = 0; i < n; ++i) {
      pe.x.row(i) = e.x.row(perm[i]);
      pe.v.row(i) = e.v.row(perm[i]);
      pa.row(i) = a.row(perm[i]);
      pdw.row(i) = dw.row(perm[i]);
    }
    const CsParams p = Params(beta, 0.1, d);
    const Ensemble out = CsEulerStep(e, a, p, 0.01, dw);
    const Ensemble pout = CsEulerStep(pe, pa, p, 0.01, pdw);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        EXPECT_EQ(pout.x(i, c), out.x(perm[i], c));
        EXPECT_NEAR(pout.v(i, c), out.v(perm[i], c), 1e-15);
      }
    }
  }
}

// Cucker-Smale written as a generic MFC problem on states (x, v).
GenericMfcProblem CsAsGeneric(const CsParams& p) {
  const int d = p.d;
  GenericMfcProblem prob;
  prob.n = 2 * d;
  prob.k = d;
  prob.d = d;
  prob.drift = [p, d](double, const Vector& s, const Vector& a, const EmpiricalLaw& law) {
    Vector b(2 * d);
    b.head(d) = s.tail(d);
    const ParticleArray& all = *law.states;
    const Eigen::Index n = all.rows();
    std::vector<double> inter(d, 0.0);
    if (p.beta == 0.0) {
      for (int c = 0; c < d; ++c) inter[c] = p.Phi * (law.mean_state[d + c] - s[d + c]);
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        double dist = 1.0;
        for (int c = 0; c < d; ++c) {
          const double dx = all(j, c) - s[c];
          dist += dx * dx;
        }
        const double w = PairWeight(p.Phi, p.beta, dist);
        for (int c = 0; c < d; ++c) inter[c] += w * (all(j, d + c) - s[d + c]);
      }
      for (int c = 0; c < d; ++c) inter[c] /= static_cast<double>(n);
    }
    for (int c = 0; c < d; ++c) b[d + c] = a[c] + inter[c];
    return b;
  };
  prob.diffusion = [p, d](double, const Vector&, const Vector&, const EmpiricalLaw&) {
    Eigen::MatrixXd sig = Eigen::MatrixXd::Zero(2 * d, d);
    sig.bottomRows(d) = p.sigma * Eigen::MatrixXd::Identity(d, d);
    return sig;
  };
  return prob;
}

TEST(GenericEulerStepTest, FrozenDynamics) {
  GenericMfcProblem prob;
  prob.drift = [](double, const Vector& x, const Vector&, const EmpiricalLaw&) {
    return Vector::Zero(x.size()).eval();
  };
  prob.diffusion = [](double, const Vector&, const Vector&, const EmpiricalLaw&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  ParticleArray x(3, 1);
  x << 0.5, -1, 2;
  EXPECT_EQ(GenericEulerStep(x, ParticleArray::Ones(3, 1), prob, 0.0, 0.1,
                             ParticleArray::Ones(3, 1)),
            x);
}

TEST(GenericEulerStepTest, PureControlIntegrator) {
  GenericMfcProblem prob;
  prob.drift = [](double, const Vector&, const Vector& a, const EmpiricalLaw&) {
    return a;
  };
  prob.diffusion = [](double, const Vector&, const Vector&, const EmpiricalLaw&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  const ParticleArray out = GenericEulerStep(
      ParticleArray::Zero(1, 1), ParticleArray::Ones(1, 1), prob, 0.0, 0.25,
      ParticleArray::Zero(1, 1));
  EXPECT_EQ(out(0, 0), 0.25);
}

TEST(GenericEulerStepTest, CsInstanceMatchesCsStep) {
  const SeededStream s(77);
  for (double beta : {0.0, 1.0, 0.7}) {
    for (int d : {1, 2}) {
      const int n = 23;
      const CsParams p = Params(beta, 0.1, d);
      const Ensemble e = UniformEnsemble(s, static_cast<uint32_t>(d), n, d);
      const ParticleArray a = Noise(3, n, d, 1.0);
      const ParticleArray dw = Noise(4, n, d, 0.05);
      ParticleArray states(n, 2 * d);
      states << e.x, e.v;
      const ParticleArray generic =
          GenericEulerStep(states, a, CsAsGeneric(p), 0.3, 0.05, dw);
      const Ensemble cs = CsEulerStep(e, a, p, 0.05, dw);
      EXPECT_EQ(generic.leftCols(d), cs.x) << "beta=" << beta << " d=" << d;
      EXPECT_LT((generic.rightCols(d) - cs.v).cwiseAbs().maxCoeff(), 1e-15)
          << "beta=" << beta << " d=" << d;
      if (beta == 0.0) EXPECT_EQ(generic.rightCols(d), cs.v);
    }
  }
}

TEST(GenericEulerStepTest, NonFiniteCoefficientNamesTimeAndParticle) {
  GenericMfcProblem prob;
  prob.drift = [](double, const Vector& x, const Vector&, const EmpiricalLaw&) {
    Vector b = x;
    if (x[0] > 1.5) b[0] = std::nan("");
    return b;
  };
  prob.diffusion = [](double, const Vector&, const Vector&, const EmpiricalLaw&) {
    return Eigen::MatrixXd::Zero(1, 1).eval();
  };
  ParticleArray x(3, 1);
  x << 0, 1, 2;
  try {
    GenericEulerStep(x, ParticleArray::Zero(3, 1), prob, 0.5, 0.1, ParticleArray::Zero(3, 1));
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& err) {
    EXPECT_NE(std::string(err.what()).find("particle 2"), std::string::npos);
    EXPECT_NE(std::string(err.what()).find("t = 0.5"), std::string::npos);
  }
}

TEST(FeaturesTest, DimensionsFollowBeta) {
  EXPECT_EQ(FeaturesForBeta(0.0), FeatureSet::kTimeVelocity);
  EXPECT_EQ(FeaturesForBeta(1.0), FeatureSet::kTimePositionVelocity);
  EXPECT_EQ(FeatureDim(FeatureSet::kTimeVelocity, 3), 4);
  EXPECT_EQ(FeatureDim(FeatureSet::kTimePositionVelocity, 3), 7);
}

TEST(FeaturesTest, LayoutAndNormalizedTime) {
  Ensemble e(2, 1);
  e.x << 3, 4;
  e.v << 5, 6;
  const TimeGrid g = MakeUniformGrid(0.0, 2.0, 4);
  const ParticleArray f = BuildFeatures(FeatureSet::kTimePositionVelocity, 1.0, g, e);
  ASSERT_EQ(f.cols(), 3);
  EXPECT_EQ(f(0, 0), 0.5);
  EXPECT_EQ(f(1, 1), 4.0);
  EXPECT_EQ(f(1, 2), 6.0);
  const ParticleArray fv = BuildFeatures(FeatureSet::kTimeVelocity, 2.0, g, e);
  ASSERT_EQ(fv.cols(), 2);
  EXPECT_EQ(fv(0, 0), 1.0);
  EXPECT_EQ(fv(0, 1), 5.0);
}

TEST(RolloutTest, SingleStepShapes) {
  const SeededStream s(1);
  const Trajectory traj = Rollout(UniformEnsemble(s, 0, 6, 1), ZeroPolicy(),
                                  MakeUniformGrid(0.0, 1.0, 1), Params(0.0, 0.1), 1);
  EXPECT_EQ(traj.states.size(), 2u);
  EXPECT_EQ(traj.controls.size(), 1u);
  EXPECT_EQ(traj.noise.size(), 1u);
}

TEST(RolloutTest, ConsensusIsPreserved) {
  Ensemble e(10, 2);
  e.v.rowwise() = Eigen::RowVector2d(0.3, 0.6);
  for (double beta : {0.0, 1.0}) {
    const Trajectory traj =
        Rollout(e, ZeroPolicy(), MakeUniformGrid(0.0, 1.0, 16), Params(beta, 0.0, 2), 3);
    EXPECT_EQ(traj.states.back().v, e.v);
  }
}

TEST(RolloutTest, SeedsDetermineTrajectory) {
  const SeededStream s(1);
  const Ensemble e0 = UniformEnsemble(s, 0, 40, 1);
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 8);
  const CsParams p = Params(1.0, 0.1);
  const RiccatiSolution ric = SolveRiccati(ToLqParams(Params(0.0, 0.1)));
  const ExactLqPolicy policy(ric, p.gamma1);
  const Trajectory a = Rollout(e0, policy, g, p, 5);
  const Trajectory b = Rollout(e0, policy, g, p, 5);
  const Trajectory c = Rollout(e0, policy, g, p, 6);
  for (int m = 0; m <= g.M; ++m) {
    EXPECT_EQ(a.states[m].x, b.states[m].x);
    EXPECT_EQ(a.states[m].v, b.states[m].v);
  }
  for (int m = 0; m < g.M; ++m) {
    EXPECT_EQ(a.noise[m], b.noise[m]);
    EXPECT_NE(a.noise[m], c.noise[m]);
  }
}

TEST(RolloutTest, RejectsDimensionMismatch) {
  EXPECT_THROW(Rollout(Ensemble(3, 2), ZeroPolicy(), MakeUniformGrid(0.0, 1.0, 2),
                       Params(0.0), 1),
               std::invalid_argument);
}

TEST(ExactLqPolicyTest, MatchesPointwiseFeedback) {
  const SeededStream s(3);
  const Ensemble e = UniformEnsemble(s, 0, 7, 2);
  const RiccatiSolution ric = SolveRiccati(ToLqParams(Params(0.0, 0.1, 2)));
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 4);
  const ParticleArray a = ExactLqPolicy(ric, 0.1).Controls(0.25, g, e);
  const Vector mean_v = ColumnMean(e.v);
  for (int i = 0; i < 7; ++i) {
    const Vector want = ExactLqFeedback(0.25, e.v.row(i).transpose(), mean_v, ric, 0.1);
    for (int c = 0; c < 2; ++c) EXPECT_DOUBLE_EQ(a(i, c), want[c]);
  }
}

TEST(PointwisePolicyTest, AppliesMapPerParticle) {
  Ensemble e(3, 1);
  e.v << 1, 2, 3;
  const PointwisePolicy policy(FeatureSet::kTimeVelocity, [](const Vector& f) {
    return Vector::Constant(1, f[0] + 10 * f[1]);
  });
  const ParticleArray a = policy.Controls(0.5, MakeUniformGrid(0.0, 1.0, 2), e);
  EXPECT_EQ(a(0, 0), 10.5);
  EXPECT_EQ(a(2, 0), 30.5);
}

TEST(RefinedNoiseTest, CoarseIncrementIsSumOfFineHalves) {
  const RefinedNoise noise(17, 2, 64);
  for (int M : {1, 2, 4, 8, 16, 32}) {
    const TimeGrid coarse = MakeUniformGrid(0.0, 1.0, M);
    const TimeGrid fine = MakeUniformGrid(0.0, 1.0, 2 * M);
    for (int m = 0; m < M; ++m) {
      ParticleArray c(5, 2), f0(5, 2), f1(5, 2);
      noise.Increments(coarse, m, c);
      noise.Increments(fine, 2 * m, f0);
      noise.Increments(fine, 2 * m + 1, f1);
      EXPECT_EQ(c, (f0 + f1).eval()) << "M=" << M << " m=" << m;
    }
  }
}

TEST(RefinedNoiseTest, FinestLevelMatchesDirectNoise) {
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 16);
  ParticleArray a(4, 3), b(4, 3);
  for (int m = 0; m < 16; ++m) {
    RefinedNoise(9, 1, 16).Increments(g, m, a);
    DirectNoise(9, 1).Increments(g, m, b);
    EXPECT_EQ(a, b);
  }
}

TEST(RefinedNoiseTest, RejectsNonDyadicGrids) {
  const RefinedNoise noise(1, 0, 48);
  ParticleArray out(2, 1);
  EXPECT_THROW(noise.Increments(MakeUniformGrid(0.0, 1.0, 16), 0, out),
               std::invalid_argument);
  EXPECT_THROW(noise.Increments(MakeUniformGrid(0.0, 1.0, 5), 0, out),
               std::invalid_argument);
  EXPECT_NO_THROW(noise.Increments(MakeUniformGrid(0.0, 1.0, 12), 0, out));
}

TEST(RefinedNoiseTest, CoarseVarianceMatchesStep) {
  const RefinedNoise noise(2, 0, 64);
  const TimeGrid g = MakeUniformGrid(0.0, 1.0, 4);
  ParticleArray dw(50000, 1);
  noise.Increments(g, 1, dw);
  EXPECT_NEAR(dw.squaredNorm() / dw.rows(), 0.25, 0.25 * 0.03);
}

}  // namespace
}  // namespace mfcpg
