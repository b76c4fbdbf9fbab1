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

#ifndef MFCPG_MLP_H_
#define MFCPG_MLP_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mfcpg/core.h"

namespace mfcpg {

enum class Activation { kRelu, kTanh };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

using RowMajorMatrix = ParticleArray;
using WeightMap = Eigen::Map<RowMajorMatrix>;
using ConstWeightMap = Eigen::Map<const RowMajorMatrix>;
using BiasMap = Eigen::Map<Eigen::VectorXd>;
using ConstBiasMap = Eigen::Map<const Eigen::VectorXd>;

// Fully connected feedback network. Hidden layers use `hidden_activation`,
// the output layer is affine. All parameters live in one flat vector: for
// each layer, the (out x in) weight matrix in row-major order followed by
// its bias vector.
class MlpPolicy {
 public:
  MlpPolicy() = default;
  // Zero-initialized parameters.
  MlpPolicy(std::vector<int> layer_dims, Activation hidden_activation);

  const std::vector<int>& layer_dims() const { return layer_dims_; }
  Activation hidden_activation() const { return hidden_activation_; }
  int num_layers() const { return static_cast<int>(layer_dims_.size()) - 1; }
  int input_dim() const { return layer_dims_.front(); }
  int output_dim() const { return layer_dims_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Index weight_offset(int layer) const { return offsets_[layer]; }
  Eigen::Index bias_offset(int layer) const {
    return offsets_[layer] + static_cast<Eigen::Index>(layer_dims_[layer + 1]) *
                                 layer_dims_[layer];
  }

  ConstWeightMap weights(int layer) const;
  WeightMap weights(int layer);
  ConstBiasMap biases(int layer) const;
  BiasMap biases(int layer);

  // Views into an arbitrary vector laid out like params() (e.g. a gradient).
  ConstWeightMap weights_in(const Vector& flat, int layer) const;
  ConstBiasMap biases_in(const Vector& flat, int layer) const;

  friend bool operator==(const MlpPolicy&, const MlpPolicy&);

 private:
  std::vector<int> layer_dims_;
  Activation hidden_activation_ = Activation::kRelu;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

// [input_dim, hidden x layers, output_dim].
std::vector<int> PolicyLayerDims(int input_dim, int hidden_width,
                                 int hidden_layers, int output_dim);

// Glorot-uniform weights on +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpPolicy InitPolicy(const std::vector<int>& layer_dims, Activation hidden,
                     uint64_t seed);

// Single-sample forward pass, plain loops.
Vector MlpForward(const MlpPolicy& policy, const Vector& input);

double ActivationValue(Activation a, double z);
// Derivative expressed through the activation output y = act(z).
double ActivationSlopeFromOutput(Activation a, double y);

// Text checkpoint, see README for the format.
void WritePolicy(std::ostream& out, const MlpPolicy& policy);
MlpPolicy ReadPolicy(std::istream& in);
void SavePolicy(const std::string& path, const MlpPolicy& policy);
MlpPolicy LoadPolicy(const std::string& path);

}  // namespace mfcpg

#endif  // MFCPG_MLP_H_
