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

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfcpg/kernels.h"

namespace mfcpg {

void ValidateCsParams(const CsParams& p) {
  if (!(p.Phi >= 0.0)) throw std::invalid_argument("Phi must be >= 0");
  if (!(p.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (!(p.sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(p.gamma1 >= 0.0)) throw std::invalid_argument("gamma1 must be >= 0");
  if (!(p.T > 0.0)) throw std::invalid_argument("T must be > 0");
  if (p.d < 1) throw std::invalid_argument("d must be >= 1");
}

LqParams ToLqParams(const CsParams& p, double var_v0) {
  LqParams lq;
  lq.Phi = p.Phi;
  lq.gamma1 = p.gamma1;
  lq.sigma = p.sigma;
  lq.T = p.T;
  lq.d = p.d;
  lq.var_v0 = var_v0;
  return lq;
}

Vector CsKernel(const Vector& x, const Vector& v, const Vector& xp,
                const Vector& vp, double Phi, double beta) {
  const double s = 1.0 + (xp - x).squaredNorm();
  return PairWeight(Phi, beta, s) * (vp - v);
}

Vector CsDrift(const Ensemble& e, int i, const Vector& a_i, const CsParams& p) {
  if (i < 0 || i >= e.size()) {
    throw std::out_of_range("cs drift: particle index " + std::to_string(i) +
                            " out of range");
  }
  const Vector mean_v = p.beta == 0.0 ? ColumnMean(e.v) : Vector();
  Vector inter(e.dim());
  kernels::InteractionAt(e.x, e.v, mean_v, i, p.Phi, p.beta, inter.data());
  Vector out(e.dim());
  for (int c = 0; c < e.dim(); ++c) out[c] = a_i[c] + inter[c];
  return out;
}

Ensemble CsEulerStep(const Ensemble& e, const ParticleArray& controls,
                     const CsParams& p, double h, const ParticleArray& noise) {
  const int n = e.size();
  const int d = e.dim();
  if (controls.rows() != n || controls.cols() != d || noise.rows() != n ||
      noise.cols() != d) {
    throw std::invalid_argument("euler step: ensemble, controls and noise shapes differ");
  }
  if (!(h > 0.0)) throw std::invalid_argument("euler step: h must be > 0");
  ParticleArray inter;
  kernels::InteractionDrift(e.x, e.v, p.Phi, p.beta, inter);
  Ensemble out(n, d);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) {
      out.x(i, c) = e.x(i, c) + h * e.v(i, c);
      out.v(i, c) = e.v(i, c) + h * (controls(i, c) + inter(i, c)) +
                    p.sigma * noise(i, c);
    }
  }
  return out;
}

ParticleArray GenericEulerStep(const ParticleArray& states,
                               const ParticleArray& controls,
                               const GenericMfcProblem& prob, double t, double h,
                               const ParticleArray& noise) {
  const Eigen::Index n = states.rows();
  if (states.cols() != prob.n || controls.cols() != prob.k ||
      noise.cols() != prob.d || controls.rows() != n || noise.rows() != n) {
    throw std::invalid_argument("generic euler step: dimensions do not match the problem");
  }
  if (!(h > 0.0)) throw std::invalid_argument("generic euler step: h must be > 0");
  const EmpiricalLaw law = MakeEmpiricalLaw(states, &controls);
  ParticleArray out(n, prob.n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = states.row(i).transpose();
    const Vector a = controls.row(i).transpose();
    const Vector b = prob.drift(t, x, a, law);
    const Eigen::MatrixXd s = prob.diffusion(t, x, a, law);
    if (b.size() != prob.n || s.rows() != prob.n || s.cols() != prob.d) {
      throw std::invalid_argument("generic euler step: coefficient has wrong shape");
    }
    if (!b.allFinite() || !s.allFinite()) {
      throw NumericalError("generic euler step: non-finite coefficient at t = " +
                           std::to_string(t) + ", particle " + std::to_string(i));
    }
    for (int j = 0; j < prob.n; ++j) {
      double diffusion = 0.0;
      for (int k = 0; k < prob.d; ++k) diffusion += s(j, k) * noise(i, k);
      out(i, j) = x[j] + h * b[j] + diffusion;
    }
  }
  return out;
}

FeatureSet FeaturesForBeta(double beta) {
  return beta == 0.0 ? FeatureSet::kTimeVelocity
                     : FeatureSet::kTimePositionVelocity;
}

int FeatureDim(FeatureSet features, int d) {
  return features == FeatureSet::kTimeVelocity ? d + 1 : 2 * d + 1;
}

ParticleArray BuildFeatures(FeatureSet features, double t, const TimeGrid& grid,
                            const Ensemble& e) {
  const int d = e.dim();
  const double tau = (t - grid.t0) / (grid.T - grid.t0);
  ParticleArray f(e.size(), FeatureDim(features, d));
  f.col(0).setConstant(tau);
  if (features == FeatureSet::kTimeVelocity) {
    f.rightCols(d) = e.v;
  } else {
    f.middleCols(1, d) = e.x;
    f.rightCols(d) = e.v;
  }
  return f;
}

ParticleArray ExactLqPolicy::Controls(double t, const TimeGrid&,
                                      const Ensemble& e) const {
  if (!(gamma1_ > 0.0)) {
    throw std::invalid_argument("lq feedback: gamma1 must be > 0");
  }
  const Vector mean_v = ColumnMean(e.v);
  const double gain = ric_.At(t) / (2.0 * gamma1_);
  ParticleArray out(e.size(), e.dim());
  for (int i = 0; i < e.size(); ++i) {
    for (int c = 0; c < e.dim(); ++c) out(i, c) = -gain * (e.v(i, c) - mean_v[c]);
  }
  return out;
}

ParticleArray PointwisePolicy::Controls(double t, const TimeGrid& grid,
                                        const Ensemble& e) const {
  const ParticleArray f = BuildFeatures(features_, t, grid, e);
  ParticleArray out(e.size(), e.dim());
  for (int i = 0; i < e.size(); ++i) {
    const Vector a = map_(f.row(i).transpose());
    if (a.size() != e.dim()) {
      throw std::invalid_argument("policy output has " + std::to_string(a.size()) +
                                  " entries, expected " + std::to_string(e.dim()));
    }
    out.row(i) = a.transpose();
  }
  return out;
}

void DirectNoise::Increments(const TimeGrid& grid, int step,
                             ParticleArray& out) const {
  kernels::FillIncrements(stream_, replica_, static_cast<uint32_t>(step), grid.h, out);
}

RefinedNoise::RefinedNoise(uint64_t seed, uint32_t replica, int fine_M)
    : stream_(seed), replica_(replica), fine_M_(fine_M) {
  if (fine_M < 1) throw std::invalid_argument("refined noise: fine_M must be >= 1");
}

double RefinedNoise::TreeSum(double fine_h, uint32_t i, uint32_t c, int first,
                             int count) const {
  if (count == 1) {
    const StreamTag tag{Purpose::kBrownian, replica_, i,
                        static_cast<uint32_t>(first), c};
    return std::sqrt(fine_h) * stream_.Normal(tag);
  }
  const int half = count / 2;
  return TreeSum(fine_h, i, c, first, half) + TreeSum(fine_h, i, c, first + half, half);
}

void RefinedNoise::Increments(const TimeGrid& grid, int step,
                              ParticleArray& out) const {
  if (fine_M_ % grid.M != 0 ||
      !std::has_single_bit(static_cast<unsigned>(fine_M_ / grid.M))) {
    throw std::invalid_argument("refined noise: grid with M = " +
                                std::to_string(grid.M) +
                                " is not a dyadic coarsening of fine_M = " +
                                std::to_string(fine_M_));
  }
  const int ratio = fine_M_ / grid.M;
  const double fine_h = (grid.T - grid.t0) / fine_M_;
  const Eigen::Index n = out.rows();
  const Eigen::Index d = out.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      out(i, c) = TreeSum(fine_h, static_cast<uint32_t>(i), static_cast<uint32_t>(c),
                          step * ratio, ratio);
    }
  }
}

Trajectory Rollout(const Ensemble& e0, const FeedbackPolicy& policy,
                   const TimeGrid& grid, const CsParams& p,
                   const NoiseSource& noise) {
  ValidateCsParams(p);
  if (e0.dim() != p.d) {
    throw std::invalid_argument("rollout: ensemble dimension does not match d");
  }
  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.M + 1);
  traj.controls.reserve(grid.M);
  traj.noise.reserve(grid.M);
  traj.states.push_back(e0);
  for (int m = 0; m < grid.M; ++m) {
    const Ensemble& e = traj.states.back();
    ParticleArray a = policy.Controls(grid.nodes[m], grid, e);
    if (a.rows() != e.size() || a.cols() != e.dim()) {
      throw std::invalid_argument("rollout: policy output dimension mismatch");
    }
    ParticleArray dw(e.size(), e.dim());
    noise.Increments(grid, m, dw);
    Ensemble next = CsEulerStep(e, a, p, grid.h, dw);
    traj.controls.push_back(std::move(a));
    traj.noise.push_back(std::move(dw));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory Rollout(const Ensemble& e0, const FeedbackPolicy& policy,
                   const TimeGrid& grid, const CsParams& p, uint64_t seed,
                   uint32_t replica) {
  return Rollout(e0, policy, grid, p, DirectNoise(seed, replica));
}

}  // namespace mfcpg
