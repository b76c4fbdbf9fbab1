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

#include <cmath>

#include "mfcpg/kernels.h"

namespace mfcpg::reference {

void InteractionDrift(const ParticleArray& x, const ParticleArray& v,
                      double Phi, double beta, ParticleArray& out) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  out = ParticleArray::Zero(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double dist2 = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        dist2 += (x(j, c) - x(i, c)) * (x(j, c) - x(i, c));
      }
      const double w = Phi / std::pow(1.0 + dist2, beta);
      for (Eigen::Index c = 0; c < d; ++c) out(i, c) += w * (v(j, c) - v(i, c));
    }
  }
  out /= static_cast<double>(n);
}

// Chain rule over ordered pairs (i, j) of
//   h/N sum_{i,j} w(s_ij) <lambda_i, v_j - v_i>,  s_ij = 1 + |x_j - x_i|^2.
void InteractionAdjoint(const ParticleArray& x, const ParticleArray& v,
                        const ParticleArray& lambda, double Phi, double beta,
                        double h, ParticleArray& lambda_x,
                        ParticleArray& lambda_v) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double scale = h / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 1.0;
      double c_ij = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        s += (x(j, c) - x(i, c)) * (x(j, c) - x(i, c));
        c_ij += lambda(i, c) * (v(j, c) - v(i, c));
      }
      const double w = Phi * std::pow(s, -beta);
      const double dw_ds = -beta * Phi * std::pow(s, -beta - 1.0);
      for (Eigen::Index c = 0; c < d; ++c) {
        lambda_v(j, c) += scale * w * lambda(i, c);
        lambda_v(i, c) -= scale * w * lambda(i, c);
        const double dxj = scale * c_ij * dw_ds * 2.0 * (x(j, c) - x(i, c));
        lambda_x(j, c) += dxj;
        lambda_x(i, c) -= dxj;
      }
    }
  }
}

void FillIncrements(const SeededStream& stream, uint32_t replica, uint32_t step,
                    double h, ParticleArray& out) {
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const StreamTag base{Purpose::kBrownian, replica, static_cast<uint32_t>(i),
                         step, 0};
    out.row(i) = GaussianIncrement(stream, base, h, static_cast<int>(out.cols()))
                     .transpose();
  }
}

void MlpForwardBatch(const MlpPolicy& policy, const ParticleArray& input,
                     MlpTape& tape) {
  const int layers = policy.num_layers();
  tape.activations.assign(layers + 1, ParticleArray());
  tape.activations[0] = input;
  for (int l = 0; l < layers; ++l) {
    const auto w = policy.weights(l);
    const auto b = policy.biases(l);
    const ParticleArray& prev = tape.activations[l];
    ParticleArray out(prev.rows(), w.rows());
    for (Eigen::Index i = 0; i < prev.rows(); ++i) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        double z = b[r];
        for (Eigen::Index c = 0; c < w.cols(); ++c) z += w(r, c) * prev(i, c);
        out(i, r) = l + 1 < layers ? ActivationValue(policy.hidden_activation(), z)
                                   : z;
      }
    }
    tape.activations[l + 1] = std::move(out);
  }
}

void MlpBackwardBatch(const MlpPolicy& policy, const MlpTape& tape,
                      const ParticleArray& grad_output, Vector& grad,
                      ParticleArray& grad_input) {
  const int layers = policy.num_layers();
  const Eigen::Index n = grad_output.rows();
  if (grad.size() != policy.num_params()) grad = Vector::Zero(policy.num_params());
  grad_input.resize(n, policy.input_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector delta = grad_output.row(i).transpose();
    for (int l = layers - 1; l >= 0; --l) {
      const auto w = policy.weights(l);
      const Eigen::Index wo = policy.weight_offset(l);
      const Eigen::Index bo = policy.bias_offset(l);
      const ParticleArray& prev = tape.activations[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          grad[wo + r * w.cols() + c] += delta[r] * prev(i, c);
        }
        grad[bo + r] += delta[r];
      }
      Vector back = Vector::Zero(w.cols());
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        for (Eigen::Index r = 0; r < w.rows(); ++r) back[c] += w(r, c) * delta[r];
        if (l > 0) {
          back[c] *= ActivationSlopeFromOutput(policy.hidden_activation(), prev(i, c));
        }
      }
      delta = std::move(back);
    }
    grad_input.row(i) = delta.transpose();
  }
}

}  // namespace mfcpg::reference
