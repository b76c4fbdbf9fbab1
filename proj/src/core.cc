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

#include "mfcpg/core.h"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include <omp.h>

namespace mfcpg {

TimeGrid MakeUniformGrid(double t0, double T, int M) {
  if (M < 1) {
    throw std::invalid_argument("time grid: step count M must be >= 1, got " +
                                std::to_string(M));
  }
  if (!(T > t0)) {
    throw std::invalid_argument("time grid: horizon T must exceed t0");
  }
  TimeGrid grid;
  grid.t0 = t0;
  grid.T = T;
  grid.M = M;
  grid.h = (T - t0) / M;
  grid.nodes.resize(M + 1);
  for (int i = 0; i < M; ++i) grid.nodes[i] = t0 + i * grid.h;
  grid.nodes[M] = T;
  return grid;
}

Ensemble::Ensemble(ParticleArray positions, ParticleArray velocities)
    : x(std::move(positions)), v(std::move(velocities)) {
  if (x.rows() != v.rows() || x.cols() != v.cols()) {
    throw std::invalid_argument("ensemble: position and velocity shapes differ");
  }
}

Vector ColumnMean(const ParticleArray& a) {
  Vector sum = Vector::Zero(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) sum[c] += a(i, c);
  }
  return sum / static_cast<double>(a.rows());
}

EmpiricalMoments ComputeEmpiricalMoments(const Ensemble& e) {
  if (e.size() < 1) {
    throw std::invalid_argument("empirical moments: empty ensemble");
  }
  EmpiricalMoments m;
  m.mean_x = ColumnMean(e.x);
  m.mean_v = ColumnMean(e.v);
  double acc = 0.0;
  for (int i = 0; i < e.size(); ++i) {
    for (int c = 0; c < e.dim(); ++c) {
      const double dv = e.v(i, c) - m.mean_v[c];
      acc += dv * dv;
    }
  }
  m.var_v = acc / e.size();
  return m;
}

std::string FormatDouble(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {
int g_workers = 0;  // 0: OpenMP default
}

void SetWorkerCount(int workers) {
  g_workers = workers > 0 ? workers : 0;
  omp_set_num_threads(g_workers > 0 ? g_workers : omp_get_num_procs());
}

int WorkerCount() {
  return g_workers > 0 ? g_workers : omp_get_max_threads();
}

}  // namespace mfcpg
