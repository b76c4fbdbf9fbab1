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

#include "mfcpg/kernels.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mfcpg::kernels {

namespace {

constexpr int kLanes = 4;

// Scratch for kLanes interleaved partial sums per component.
class LaneSums {
 public:
  explicit LaneSums(Eigen::Index d) {
    if (d * kLanes > static_cast<Eigen::Index>(sizeof(stack_) / sizeof(double))) {
      heap_.resize(d * kLanes);
      data_ = heap_.data();
    }
    std::fill(data_, data_ + d * kLanes, 0.0);
  }
  double* row(Eigen::Index c) { return data_ + c * kLanes; }
  static double Total(const double* lanes) {
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  }

 private:
  double stack_[4 * kLanes];
  std::vector<double> heap_;
  double* data_ = stack_;
};

// (1/n) sum_j w(1 + |x_j - x_i|^2) (v_j - v_i).
template <int kDim, class Weight>
void PairSum(const ParticleArray& x, const ParticleArray& v, Eigen::Index i, Weight weight,
             double* out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = kDim > 0 ? kDim : x.cols();
  const double* xd = x.data();
  const double* vd = v.data();
  LaneSums acc(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 1.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double dx = xd[j * d + c] - xd[i * d + c];
      s += dx * dx;
    }
    const double w = weight(s);
    const int lane = static_cast<int>(j & (kLanes - 1));
    for (Eigen::Index c = 0; c < d; ++c) {
      acc.row(c)[lane] += w * (vd[j * d + c] - vd[i * d + c]);
    }
  }
  for (Eigen::Index c = 0; c < d; ++c) {
    out[c] = LaneSums::Total(acc.row(c)) / static_cast<double>(n);
  }
}

// Accumulates the adjoint of particle k through every pair (k, j).
template <int kDim, class Weights>
void PairAdjoint(const ParticleArray& x, const ParticleArray& v, const ParticleArray& lambda,
                 Eigen::Index k, Weights weights, double* acc_v, double* acc_x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = kDim > 0 ? kDim : x.cols();
  const double* xd = x.data();
  const double* vd = v.data();
  const double* ld = lambda.data();
  LaneSums sv(d), sx(d);
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 1.0;
    double dot = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double dx = xd[k * d + c] - xd[j * d + c];
      s += dx * dx;
      dot += (ld[k * d + c] - ld[j * d + c]) * (vd[j * d + c] - vd[k * d + c]);
    }
    double w, ws;
    weights(s, w, ws);
    const int lane = static_cast<int>(j & (kLanes - 1));
    for (Eigen::Index c = 0; c < d; ++c) {
      sv.row(c)[lane] += w * (ld[j * d + c] - ld[k * d + c]);
      sx.row(c)[lane] += ws * (xd[k * d + c] - xd[j * d + c]) * dot;
    }
  }
  for (Eigen::Index c = 0; c < d; ++c) {
    acc_v[c] = LaneSums::Total(sv.row(c));
    acc_x[c] = LaneSums::Total(sx.row(c));
  }
}

// Fixed-size instances for d <= 3.
template <class Weight>
void PairSumAnyDim(const ParticleArray& x, const ParticleArray& v, Eigen::Index i,
                   Weight weight, double* out) {
  switch (x.cols()) {
    case 1: return PairSum<1>(x, v, i, weight, out);
    case 2: return PairSum<2>(x, v, i, weight, out);
    case 3: return PairSum<3>(x, v, i, weight, out);
    default: return PairSum<0>(x, v, i, weight, out);
  }
}

template <class Weights>
void PairAdjointAnyDim(const ParticleArray& x, const ParticleArray& v,
                       const ParticleArray& lambda, Eigen::Index k, Weights weights,
                       double* acc_v, double* acc_x) {
  switch (x.cols()) {
    case 1: return PairAdjoint<1>(x, v, lambda, k, weights, acc_v, acc_x);
    case 2: return PairAdjoint<2>(x, v, lambda, k, weights, acc_v, acc_x);
    case 3: return PairAdjoint<3>(x, v, lambda, k, weights, acc_v, acc_x);
    default: return PairAdjoint<0>(x, v, lambda, k, weights, acc_v, acc_x);
  }
}

}  // namespace

void InteractionAt(const ParticleArray& x, const ParticleArray& v,
                   const Vector& mean_v, Eigen::Index i, double Phi,
                   double beta, double* out) {
  const Eigen::Index d = x.cols();
  if (beta == 0.0) {
    for (Eigen::Index c = 0; c < d; ++c) out[c] = Phi * (mean_v[c] - v(i, c));
  } else if (beta == 1.0) {
    PairSumAnyDim(x, v, i, [Phi](double s) { return Phi / s; }, out);
  } else {
    PairSumAnyDim(x, v, i, [Phi, beta](double s) { return Phi / std::pow(s, beta); }, out);
  }
}

void InteractionDrift(const ParticleArray& x, const ParticleArray& v,
                      double Phi, double beta, ParticleArray& out) {
  const Eigen::Index n = x.rows();
  out.resize(n, x.cols());
  const Vector mean_v = beta == 0.0 ? ColumnMean(v) : Vector();
#pragma omp parallel
  {
    std::vector<double> row(x.cols());
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      InteractionAt(x, v, mean_v, i, Phi, beta, row.data());
      for (Eigen::Index c = 0; c < x.cols(); ++c) out(i, c) = row[c];
    }
  }
}

void InteractionAdjoint(const ParticleArray& x, const ParticleArray& v,
                        const ParticleArray& lambda, double Phi, double beta,
                        double h, ParticleArray& lambda_x,
                        ParticleArray& lambda_v) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (beta == 0.0) {
    const Vector mean_lambda = ColumnMean(lambda);
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index c = 0; c < d; ++c) {
        lambda_v(k, c) += h * Phi * (mean_lambda[c] - lambda(k, c));
      }
    }
    return;
  }
  const double scale = h / static_cast<double>(n);
#pragma omp parallel
  {
    std::vector<double> acc_v(d), acc_x(d);
#pragma omp for schedule(static)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (beta == 1.0) {
        PairAdjointAnyDim(x, v, lambda, k,
                    [Phi](double s, double& w, double& ws) {
                      const double inv = 1.0 / s;
                      w = Phi * inv;
                      ws = -w * inv;
                    },
                    acc_v.data(), acc_x.data());
      } else {
        PairAdjointAnyDim(x, v, lambda, k,
                    [Phi, beta](double s, double& w, double& ws) {
                      w = PairWeight(Phi, beta, s);
                      ws = PairWeightSlope(Phi, beta, s);
                    },
                    acc_v.data(), acc_x.data());
      }
      for (Eigen::Index c = 0; c < d; ++c) {
        lambda_v(k, c) += scale * acc_v[c];
        lambda_x(k, c) += 2.0 * scale * acc_x[c];
      }
    }
  }
}

void FillIncrements(const SeededStream& stream, uint32_t replica, uint32_t step,
                    double h, ParticleArray& out) {
  const Eigen::Index n = out.rows();
  const Eigen::Index d = out.cols();
  const double scale = std::sqrt(h);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const StreamTag tag{Purpose::kBrownian, replica, static_cast<uint32_t>(i),
                          step, static_cast<uint32_t>(c)};
      out(i, c) = h == 0.0 ? 0.0 : scale * stream.Normal(tag);
    }
  }
}

void MlpForwardBatch(const MlpPolicy& policy, const ParticleArray& input,
                     MlpTape& tape) {
  if (input.cols() != policy.input_dim()) {
    throw std::invalid_argument("mlp batch: feature width does not match policy input");
  }
  const int layers = policy.num_layers();
  const Eigen::Index n = input.rows();
  tape.activations.resize(layers + 1);
  tape.activations[0] = input;
  for (int l = 0; l < layers; ++l) {
    tape.activations[l + 1].resize(n, policy.layer_dims()[l + 1]);
  }
  const Activation act = policy.hidden_activation();
  const int chunks = NumChunks(n);
#pragma omp parallel for schedule(static)
  for (int chunk = 0; chunk < chunks; ++chunk) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(chunk) * kChunkRows;
    const Eigen::Index rows = std::min<Eigen::Index>(kChunkRows, n - r0);
    for (int l = 0; l < layers; ++l) {
      auto out = tape.activations[l + 1].middleRows(r0, rows);
      out.noalias() =
          tape.activations[l].middleRows(r0, rows) * policy.weights(l).transpose();
      out.rowwise() += policy.biases(l).transpose();
      if (l + 1 < layers) {
        if (act == Activation::kRelu) {
          out = out.cwiseMax(0.0);
        } else {
          out = out.array().tanh().matrix();
        }
      }
    }
  }
}

void MlpBackwardBatch(const MlpPolicy& policy, const MlpTape& tape,
                      const ParticleArray& grad_output,
                      std::vector<Vector>& chunk_grads,
                      ParticleArray& grad_input) {
  const int layers = policy.num_layers();
  const Eigen::Index n = grad_output.rows();
  const int chunks = NumChunks(n);
  if (static_cast<int>(chunk_grads.size()) != chunks) {
    chunk_grads.assign(chunks, Vector::Zero(policy.num_params()));
  }
  grad_input.resize(n, policy.input_dim());
  const Activation act = policy.hidden_activation();
#pragma omp parallel for schedule(static)
  for (int chunk = 0; chunk < chunks; ++chunk) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(chunk) * kChunkRows;
    const Eigen::Index rows = std::min<Eigen::Index>(kChunkRows, n - r0);
    Vector& g = chunk_grads[chunk];
    RowMajorMatrix delta = grad_output.middleRows(r0, rows);
    for (int l = layers - 1; l >= 0; --l) {
      const auto prev = tape.activations[l].middleRows(r0, rows);
      WeightMap gw(g.data() + policy.weight_offset(l), policy.layer_dims()[l + 1],
                   policy.layer_dims()[l]);
      BiasMap gb(g.data() + policy.bias_offset(l), policy.layer_dims()[l + 1]);
      gw.noalias() += delta.transpose() * prev;
      gb.noalias() += delta.colwise().sum().transpose();
      if (l > 0) {
        RowMajorMatrix back = delta * policy.weights(l);
        if (act == Activation::kRelu) {
          back = back.cwiseProduct((prev.array() > 0.0).cast<double>().matrix());
        } else {
          back = back.cwiseProduct((1.0 - prev.array().square()).matrix());
        }
        delta = std::move(back);
      } else {
        grad_input.middleRows(r0, rows).noalias() = delta * policy.weights(0);
      }
    }
  }
}

Vector ReduceChunks(const std::vector<Vector>& chunk_grads, Eigen::Index size) {
  Vector total = Vector::Zero(size);
  for (const Vector& g : chunk_grads) total += g;
  return total;
}

}  // namespace mfcpg::kernels
