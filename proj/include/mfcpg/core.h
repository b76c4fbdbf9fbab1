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

#ifndef MFCPG_CORE_H_
#define MFCPG_CORE_H_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mfcpg {

// N x d array, one particle per row.
using ParticleArray =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Raised when a computation produces a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniform partition of [t0, T] into M cells.
struct TimeGrid {
  double t0 = 0.0;
  double T = 1.0;
  int M = 1;
  double h = 1.0;
  std::vector<double> nodes;

  double time(int i) const { return nodes[i]; }
};

// Builds nodes t0 + i*h with the last node pinned to T. Throws
// std::invalid_argument unless M >= 1 and T > t0.
TimeGrid MakeUniformGrid(double t0, double T, int M);

// Positions and velocities of N particles in R^d.
struct Ensemble {
  ParticleArray x;
  ParticleArray v;

  Ensemble() = default;
  Ensemble(int n, int d) : x(ParticleArray::Zero(n, d)), v(ParticleArray::Zero(n, d)) {}
  Ensemble(ParticleArray positions, ParticleArray velocities);

  int size() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

struct EmpiricalMoments {
  Vector mean_x;
  Vector mean_v;
  // (1/N) sum_i |v_i - mean_v|^2
  double var_v = 0.0;
};

EmpiricalMoments ComputeEmpiricalMoments(const Ensemble& e);

// Row average accumulated sequentially in particle order.
Vector ColumnMean(const ParticleArray& a);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double x);

// Worker count used by the OpenMP kernels. Results never depend on it.
void SetWorkerCount(int workers);
int WorkerCount();

}  // namespace mfcpg

#endif  // MFCPG_CORE_H_
