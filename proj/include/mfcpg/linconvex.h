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

#ifndef MFCPG_LINCONVEX_H_
#define MFCPG_LINCONVEX_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mfcpg/core.h"

namespace mfcpg {

// Scalar linear-convex extended MFC model: drift
//   b0 + b1 x + b2 a + beta E x + gamma E a,
// running cost quadratic in the control,
//   f = (f1(x, law of x) + q a^2 + qbar (a - r E a)^2 + 2 c x a) / 2,
// so that with adjoint Y the optimality condition reads
//   b2 Y + gamma E Y + (q + qbar) a + qbar r (r - 2) E a + c X = 0.
// Coefficients are callables of t.
struct LinConvexCoeffs {
  using Fn = std::function<double(double)>;
  Fn b2;
  Fn gamma;
  Fn q;
  Fn qbar;
  Fn r;
  Fn c;
  double lambda1 = 0.0;  // required lower bound on q

  static LinConvexCoeffs Constant(double b2, double gamma, double q, double qbar,
                                  double r, double c, double lambda1 = 0.0);
};

// Coefficient values frozen at one time.
struct LinConvexValues {
  double b2, gamma, q, qbar, r, c;
};

// Evaluates the coefficients at t. Throws std::invalid_argument unless
// q >= lambda1, q > 0, qbar >= 0 and q + qbar (r-1)^2 > 0.
LinConvexValues EvaluateCoeffs(double t, const LinConvexCoeffs& coeffs);

struct PsiZeta {
  double psi;
  double zeta;
};

//   psi  = c qbar r (r - 2) / (q + qbar (r-1)^2),
//   zeta = (b2 + gamma) qbar r (r - 2) / (q + qbar (r-1)^2).
PsiZeta ComputePsiZeta(double t, const LinConvexCoeffs& coeffs);

// Optimal feedback
//   [-c x - b2 y + psi mean_x + (zeta - gamma) mean_y] / (q + qbar).
double LinearConvexFeedback(double t, double x, double y, double mean_x,
                            double mean_y, const LinConvexCoeffs& coeffs);

// E[a] implied by the feedback: -((b2 + gamma) mean_y + c mean_x) /
// (q + qbar (r-1)^2).
double LinearConvexMeanControl(double t, double mean_x, double mean_y,
                               const LinConvexCoeffs& coeffs);

struct StateAdjointSample {
  double x;
  double y;
};

// Per-sample residual of the optimality condition with expectations replaced
// by sample means.
std::vector<double> OptimalityResidual(std::span<const StateAdjointSample> samples,
                                       double t, const LinConvexCoeffs& coeffs,
                                       std::span<const double> controls);

// Magnitude of the largest term in each residual, for relative checks.
std::vector<double> OptimalityResidualScale(
    std::span<const StateAdjointSample> samples, double t,
    const LinConvexCoeffs& coeffs, std::span<const double> controls);

// Largest relative residual max_i |res_i| / scale_i over `draws` random
// constant-coefficient models (q in [0.1, 2.1], qbar in [0, 2]) and sample
// sets of 1 to 64 points, with controls from LinearConvexFeedback.
double MaxRelativeOptimalityResidual(uint64_t seed, int draws);

// Left-endpoint hold of a path sampled on fine_grid onto the cells of
// coarse_grid: node t_j takes the value at the last coarse node <= t_j that
// starts a cell. The terminal node carries the last cell's value.
std::vector<double> ProjectPiecewiseConstant(std::span<const double> path,
                                             const TimeGrid& fine_grid,
                                             const TimeGrid& coarse_grid);

}  // namespace mfcpg

#endif  // MFCPG_LINCONVEX_H_
