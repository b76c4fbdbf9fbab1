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

#include "mfcpg/linconvex.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfcpg/random.h"

namespace mfcpg {

LinConvexCoeffs LinConvexCoeffs::Constant(double b2, double gamma, double q,
                                          double qbar, double r, double c,
                                          double lambda1) {
  auto k = [](double value) { return [value](double) { return value; }; };
  return LinConvexCoeffs{k(b2), k(gamma), k(q), k(qbar), k(r), k(c), lambda1};
}

LinConvexValues EvaluateCoeffs(double t, const LinConvexCoeffs& coeffs) {
  const LinConvexValues v{coeffs.b2(t), coeffs.gamma(t), coeffs.q(t),
                          coeffs.qbar(t), coeffs.r(t),   coeffs.c(t)};
  if (!(v.q > 0.0) || v.q < coeffs.lambda1) {
    throw std::invalid_argument("linear-convex coefficients: q must be >= lambda1 > 0");
  }
  if (!(v.qbar >= 0.0)) {
    throw std::invalid_argument("linear-convex coefficients: qbar must be >= 0");
  }
  if (!(v.q + v.qbar * (v.r - 1.0) * (v.r - 1.0) > 0.0)) {
    throw std::invalid_argument(
        "linear-convex coefficients: q + qbar (r-1)^2 must be > 0");
  }
  return v;
}

namespace {

double MeanCoupling(const LinConvexValues& v) { return v.qbar * v.r * (v.r - 2.0); }

double MeanDenominator(const LinConvexValues& v) {
  return v.q + v.qbar * (v.r - 1.0) * (v.r - 1.0);
}

}  // namespace

PsiZeta ComputePsiZeta(double t, const LinConvexCoeffs& coeffs) {
  const LinConvexValues v = EvaluateCoeffs(t, coeffs);
  const double ratio = MeanCoupling(v) / MeanDenominator(v);
  return {v.c * ratio, (v.b2 + v.gamma) * ratio};
}

double LinearConvexFeedback(double t, double x, double y, double mean_x,
                            double mean_y, const LinConvexCoeffs& coeffs) {
  const LinConvexValues v = EvaluateCoeffs(t, coeffs);
  const PsiZeta pz = ComputePsiZeta(t, coeffs);
  return (-v.c * x - v.b2 * y + pz.psi * mean_x + (-v.gamma + pz.zeta) * mean_y) /
         (v.q + v.qbar);
}

double LinearConvexMeanControl(double t, double mean_x, double mean_y,
                               const LinConvexCoeffs& coeffs) {
  const LinConvexValues v = EvaluateCoeffs(t, coeffs);
  return (-(v.b2 + v.gamma) * mean_y - v.c * mean_x) / MeanDenominator(v);
}

namespace {

struct SampleMeans {
  double x = 0.0;
  double y = 0.0;
  double a = 0.0;
};

SampleMeans Means(std::span<const StateAdjointSample> samples,
                  std::span<const double> controls) {
  if (samples.empty()) {
    throw std::invalid_argument("optimality residual: empty sample set");
  }
  if (samples.size() != controls.size()) {
    throw std::invalid_argument("optimality residual: samples and controls differ in length");
  }
  SampleMeans m;
  for (size_t i = 0; i < samples.size(); ++i) {
    m.x += samples[i].x;
    m.y += samples[i].y;
    m.a += controls[i];
  }
  const double n = static_cast<double>(samples.size());
  m.x /= n;
  m.y /= n;
  m.a /= n;
  return m;
}

}  // namespace

std::vector<double> OptimalityResidual(std::span<const StateAdjointSample> samples,
                                       double t, const LinConvexCoeffs& coeffs,
                                       std::span<const double> controls) {
  const SampleMeans m = Means(samples, controls);
  const LinConvexValues v = EvaluateCoeffs(t, coeffs);
  std::vector<double> out(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    out[i] = v.b2 * samples[i].y + v.gamma * m.y + (v.q + v.qbar) * controls[i] +
             MeanCoupling(v) * m.a + v.c * samples[i].x;
  }
  return out;
}

std::vector<double> OptimalityResidualScale(
    std::span<const StateAdjointSample> samples, double t,
    const LinConvexCoeffs& coeffs, std::span<const double> controls) {
  const SampleMeans m = Means(samples, controls);
  const LinConvexValues v = EvaluateCoeffs(t, coeffs);
  std::vector<double> out(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    out[i] = std::max({std::abs(v.b2 * samples[i].y), std::abs(v.gamma * m.y),
                       std::abs((v.q + v.qbar) * controls[i]),
                       std::abs(MeanCoupling(v) * m.a),
                       std::abs(v.c * samples[i].x)});
  }
  return out;
}

double MaxRelativeOptimalityResidual(uint64_t seed, int draws) {
  if (draws < 1) throw std::invalid_argument("residual check: draws must be >= 1");
  const SeededStream stream(seed);
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const auto draw = static_cast<uint32_t>(k);
    auto u = [&](uint32_t field, double lo, double hi, uint32_t sample = 0) {
      return lo + (hi - lo) * stream.Uniform({Purpose::kTest, draw, sample, field, 0});
    };
    const LinConvexCoeffs coeffs = LinConvexCoeffs::Constant(
        u(0, -2.0, 2.0), u(1, -2.0, 2.0), u(2, 0.1, 2.1), u(3, 0.0, 2.0),
        u(4, -2.0, 2.0), u(5, -1.0, 1.0), 0.1);
    const double t = u(6, 0.0, 1.0);
    const int n = 1 + std::min(63, static_cast<int>(64.0 * u(7, 0.0, 1.0)));
    std::vector<StateAdjointSample> samples(n);
    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto s = static_cast<uint32_t>(i + 1);
      samples[i] = {u(8, -3.0, 3.0, s), u(9, -3.0, 3.0, s)};
      mean_x += samples[i].x;
      mean_y += samples[i].y;
    }
    mean_x /= n;
    mean_y /= n;
    std::vector<double> controls(n);
    for (int i = 0; i < n; ++i) {
      controls[i] =
          LinearConvexFeedback(t, samples[i].x, samples[i].y, mean_x, mean_y, coeffs);
    }
    const auto res = OptimalityResidual(samples, t, coeffs, controls);
    const auto scale = OptimalityResidualScale(samples, t, coeffs, controls);
    for (int i = 0; i < n; ++i) {
      if (scale[i] > 0.0) worst = std::max(worst, std::abs(res[i]) / scale[i]);
    }
  }
  return worst;
}

std::vector<double> ProjectPiecewiseConstant(std::span<const double> path,
                                             const TimeGrid& fine_grid,
                                             const TimeGrid& coarse_grid) {
  if (static_cast<int>(path.size()) != fine_grid.M + 1) {
    throw std::invalid_argument("projection: path length must be fine M + 1");
  }
  if (fine_grid.t0 != coarse_grid.t0 || fine_grid.T != coarse_grid.T ||
      fine_grid.M % coarse_grid.M != 0) {
    throw std::invalid_argument("projection: coarse grid (M = " +
                                std::to_string(coarse_grid.M) +
                                ") is not nested in the fine grid (M = " +
                                std::to_string(fine_grid.M) + ")");
  }
  const int ratio = fine_grid.M / coarse_grid.M;
  std::vector<double> out(path.size());
  for (int j = 0; j <= fine_grid.M; ++j) {
    const int cell = std::min(j / ratio, coarse_grid.M - 1);
    out[j] = path[cell * ratio];
  }
  return out;
}

}  // namespace mfcpg
