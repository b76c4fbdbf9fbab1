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

#include "mfcpg/mlp.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mfcpg/random.h"

namespace mfcpg {

std::string_view ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

MlpPolicy::MlpPolicy(std::vector<int> layer_dims, Activation hidden_activation)
    : layer_dims_(std::move(layer_dims)), hidden_activation_(hidden_activation) {
  if (layer_dims_.size() < 2) {
    throw std::invalid_argument("mlp: need at least input and output dims");
  }
  Eigen::Index total = 0;
  for (size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    if (layer_dims_[l] < 1 || layer_dims_[l + 1] < 1) {
      throw std::invalid_argument("mlp: layer widths must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(layer_dims_[l + 1]) * (layer_dims_[l] + 1);
  }
  params_ = Vector::Zero(total);
}

ConstWeightMap MlpPolicy::weights(int l) const {
  return weights_in(params_, l);
}
WeightMap MlpPolicy::weights(int l) {
  return WeightMap(params_.data() + weight_offset(l), layer_dims_[l + 1],
                   layer_dims_[l]);
}
ConstBiasMap MlpPolicy::biases(int l) const { return biases_in(params_, l); }
BiasMap MlpPolicy::biases(int l) {
  return BiasMap(params_.data() + bias_offset(l), layer_dims_[l + 1]);
}
ConstWeightMap MlpPolicy::weights_in(const Vector& flat, int l) const {
  return ConstWeightMap(flat.data() + weight_offset(l), layer_dims_[l + 1],
                        layer_dims_[l]);
}
ConstBiasMap MlpPolicy::biases_in(const Vector& flat, int l) const {
  return ConstBiasMap(flat.data() + bias_offset(l), layer_dims_[l + 1]);
}

bool operator==(const MlpPolicy& a, const MlpPolicy& b) {
  return a.layer_dims_ == b.layer_dims_ &&
         a.hidden_activation_ == b.hidden_activation_ &&
         a.params_.size() == b.params_.size() && a.params_ == b.params_;
}

std::vector<int> PolicyLayerDims(int input_dim, int hidden_width,
                                 int hidden_layers, int output_dim) {
  std::vector<int> dims{input_dim};
  for (int l = 0; l < hidden_layers; ++l) dims.push_back(hidden_width);
  dims.push_back(output_dim);
  return dims;
}

MlpPolicy InitPolicy(const std::vector<int>& layer_dims, Activation hidden,
                     uint64_t seed) {
  MlpPolicy policy(layer_dims, hidden);
  const SeededStream stream(seed);
  for (int l = 0; l < policy.num_layers(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    auto w = policy.weights(l);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        const StreamTag tag{Purpose::kWeightInit, 0, static_cast<uint32_t>(l),
                            static_cast<uint32_t>(r), static_cast<uint32_t>(c)};
        w(r, c) = bound * (2.0 * stream.Uniform(tag) - 1.0);
      }
    }
  }
  return policy;
}

double ActivationValue(Activation a, double z) {
  return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

double ActivationSlopeFromOutput(Activation a, double y) {
  return a == Activation::kRelu ? (y > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

Vector MlpForward(const MlpPolicy& policy, const Vector& input) {
  if (input.size() != policy.input_dim()) {
    throw std::invalid_argument("mlp forward: input has " +
                                std::to_string(input.size()) + " entries, expected " +
                                std::to_string(policy.input_dim()));
  }
  Vector a = input;
  for (int l = 0; l < policy.num_layers(); ++l) {
    const auto w = policy.weights(l);
    const auto b = policy.biases(l);
    Vector z(w.rows());
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double acc = b[r];
      for (Eigen::Index c = 0; c < w.cols(); ++c) acc += w(r, c) * a[c];
      z[r] = acc;
    }
    if (l + 1 < policy.num_layers()) {
      for (Eigen::Index r = 0; r < z.size(); ++r) {
        z[r] = ActivationValue(policy.hidden_activation(), z[r]);
      }
    }
    a = std::move(z);
  }
  return a;
}

namespace {

constexpr std::string_view kMagic = "mfcpg-policy";
constexpr int kFormatVersion = 1;

double ParseDouble(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("policy checkpoint: bad number '" + s + "'");
  }
  return x;
}

void Expect(std::istream& in, std::string_view word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw std::runtime_error("policy checkpoint: expected '" + std::string(word) +
                             "', got '" + got + "'");
  }
}

}  // namespace

void WritePolicy(std::ostream& out, const MlpPolicy& policy) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "activation " << ActivationName(policy.hidden_activation()) << '\n';
  out << "dims";
  for (int d : policy.layer_dims()) out << ' ' << d;
  out << '\n';
  out << "params " << policy.num_params() << '\n';
  for (Eigen::Index i = 0; i < policy.num_params(); ++i) {
    out << FormatDouble(policy.params()[i]) << '\n';
  }
}

MlpPolicy ReadPolicy(std::istream& in) {
  Expect(in, kMagic);
  int version = 0;
  if (!(in >> version) || version != kFormatVersion) {
    throw std::runtime_error("policy checkpoint: unsupported version");
  }
  Expect(in, "activation");
  std::string act;
  in >> act;
  Expect(in, "dims");
  std::string line;
  std::getline(in, line);
  std::istringstream dims_in(line);
  std::vector<int> dims;
  for (int d; dims_in >> d;) dims.push_back(d);
  MlpPolicy policy(dims, ParseActivation(act));
  Expect(in, "params");
  Eigen::Index count = 0;
  in >> count;
  if (count != policy.num_params()) {
    throw std::runtime_error("policy checkpoint: parameter count mismatch");
  }
  for (Eigen::Index i = 0; i < count; ++i) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("policy checkpoint: truncated");
    policy.params()[i] = ParseDouble(tok);
  }
  return policy;
}

void SavePolicy(const std::string& path, const MlpPolicy& policy) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  WritePolicy(out, policy);
}

MlpPolicy LoadPolicy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ReadPolicy(in);
}

}  // namespace mfcpg
