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

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

namespace mfcpg {
namespace {

MlpPolicy Toy(Activation act) {
  MlpPolicy p({2, 2, 1}, act);
  p.weights(0) << 1, -1, 0.5, 2;
  p.biases(0) << 0.1, -0.2;
  p.weights(1) << 2, -3;
  p.biases(1) << 0.5;
  return p;
}

Vector Vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(MlpPolicyTest, FlatLayout) {
  const MlpPolicy p({3, 4, 2}, Activation::kRelu);
  EXPECT_EQ(p.num_params(), 3 * 4 + 4 + 4 * 2 + 2);
  EXPECT_EQ(p.weight_offset(0), 0);
  EXPECT_EQ(p.bias_offset(0), 12);
  EXPECT_EQ(p.weight_offset(1), 16);
  EXPECT_EQ(p.bias_offset(1), 24);
  MlpPolicy q = p;
  q.weights(1)(1, 2) = 7.0;  // row-major (out x in)
  EXPECT_EQ(q.params()[16 + 1 * 4 + 2], 7.0);
}

TEST(MlpPolicyTest, RejectsBadShapes) {
  EXPECT_THROW(MlpPolicy({3}, Activation::kRelu), std::invalid_argument);
  EXPECT_THROW(MlpPolicy({3, 0, 1}, Activation::kRelu), std::invalid_argument);
}

TEST(PolicyLayerDimsTest, ReferenceArchitecture) {
  EXPECT_EQ(PolicyLayerDims(2, 110, 2, 1), (std::vector<int>{2, 110, 110, 1}));
  EXPECT_EQ(PolicyLayerDims(3, 5, 0, 1), (std::vector<int>{3, 1}));
}

TEST(MlpForwardTest, ZeroNetworkGivesZero) {
  const MlpPolicy p(PolicyLayerDims(4, 8, 2, 3), Activation::kRelu);
  Vector in(4);
  in << 1, -2, 3, 0.5;
  EXPECT_EQ(MlpForward(p, in), Vector::Zero(3));
}

TEST(MlpForwardTest, DeadReluPath) {
  MlpPolicy p({1, 1, 1}, Activation::kRelu);
  p.params().setOnes();
  p.biases(0).setZero();
  p.biases(1).setZero();
  EXPECT_EQ(MlpForward(p, Vector::Constant(1, -3.0))[0], 0.0);
}

TEST(MlpForwardTest, ToyNetworkHandValues) {
  const MlpPolicy relu = Toy(Activation::kRelu);
  // Hidden (0.6, 1.3) -> 1.2 - 3.9 + 0.5.
  EXPECT_DOUBLE_EQ(MlpForward(relu, Vec2(1, 0.5))[0], -2.2);
  // First unit clipped: hidden (0, 1.3).
  EXPECT_DOUBLE_EQ(MlpForward(relu, Vec2(-1, 1))[0], -3.4);
  const MlpPolicy tanh = Toy(Activation::kTanh);
  EXPECT_DOUBLE_EQ(MlpForward(tanh, Vec2(1, 0.5))[0],
                   2 * std::tanh(0.6) - 3 * std::tanh(1.3) + 0.5);
}

TEST(MlpForwardTest, IsPure) {
  const MlpPolicy p = InitPolicy(PolicyLayerDims(2, 16, 2, 1), Activation::kTanh, 4);
  EXPECT_EQ(MlpForward(p, Vec2(0.3, 0.9)), MlpForward(p, Vec2(0.3, 0.9)));
}

TEST(MlpForwardTest, RejectsWrongInputWidth) {
  EXPECT_THROW(MlpForward(Toy(Activation::kRelu), Vector::Zero(3)), std::invalid_argument);
}

TEST(InitPolicyTest, SameSeedSameParameters) {
  const auto dims = PolicyLayerDims(3, 20, 2, 1);
  EXPECT_EQ(InitPolicy(dims, Activation::kRelu, 9), InitPolicy(dims, Activation::kRelu, 9));
  EXPECT_NE(InitPolicy(dims, Activation::kRelu, 9).params(),
            InitPolicy(dims, Activation::kRelu, 10).params());
}

TEST(InitPolicyTest, BiasesAreZero) {
  const MlpPolicy p = InitPolicy(PolicyLayerDims(2, 110, 2, 1), Activation::kRelu, 1);
  for (int l = 0; l < p.num_layers(); ++l) {
    EXPECT_TRUE((p.biases(l).array() == 0.0).all()) << "layer " << l;
  }
}

TEST(InitPolicyTest, WeightsAreGlorotUniform) {
  const MlpPolicy p = InitPolicy({110, 110}, Activation::kRelu, 3);
  const auto w = p.weights(0);
  const double bound = std::sqrt(6.0 / 220.0);
  const double n = static_cast<double>(w.size());
  EXPECT_GE(w.minCoeff(), -bound);
  EXPECT_LE(w.maxCoeff(), bound);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / n;
  const double sd = bound / std::sqrt(3.0);
  EXPECT_LT(std::abs(mean), 4 * sd / std::sqrt(n));
  EXPECT_NEAR(var, sd * sd, 0.04 * sd * sd);
  // Nearly the whole interval is used.
  EXPECT_LT(w.minCoeff(), -0.99 * bound);
  EXPECT_GT(w.maxCoeff(), 0.99 * bound);
}

TEST(CheckpointTest, RoundTripIsExact) {
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    const MlpPolicy p = InitPolicy(PolicyLayerDims(3, 7, 2, 1), act, 5);
    std::stringstream buf;
    WritePolicy(buf, p);
    EXPECT_EQ(ReadPolicy(buf), p);
  }
}

TEST(CheckpointTest, HeaderFormat) {
  std::stringstream buf;
  WritePolicy(buf, Toy(Activation::kTanh));
  std::string line;
  std::getline(buf, line);
  EXPECT_EQ(line, "mfcpg-policy 1");
  std::getline(buf, line);
  EXPECT_EQ(line, "activation tanh");
  std::getline(buf, line);
  EXPECT_EQ(line, "dims 2 2 1");
  std::getline(buf, line);
  EXPECT_EQ(line, "params 9");
  std::getline(buf, line);
  EXPECT_EQ(line, "1");
}

TEST(CheckpointTest, RejectsCorruptInput) {
  std::stringstream truncated("mfcpg-policy 1\nactivation relu\ndims 1 1\nparams 2\n0.5\n");
  EXPECT_THROW(ReadPolicy(truncated), std::runtime_error);
  std::stringstream version("mfcpg-policy 9\n");
  EXPECT_THROW(ReadPolicy(version), std::runtime_error);
  std::stringstream count("mfcpg-policy 1\nactivation relu\ndims 1 1\nparams 3\n1\n2\n3\n");
  EXPECT_THROW(ReadPolicy(count), std::runtime_error);
  std::stringstream act("mfcpg-policy 1\nactivation sigmoid\ndims 1 1\nparams 2\n1\n2\n");
  EXPECT_THROW(ReadPolicy(act), std::exception);
}

TEST(ActivationTest, NamesRoundTrip) {
  EXPECT_EQ(ParseActivation(ActivationName(Activation::kRelu)), Activation::kRelu);
  EXPECT_EQ(ParseActivation(ActivationName(Activation::kTanh)), Activation::kTanh);
  EXPECT_THROW(ParseActivation("gelu"), std::invalid_argument);
}

}  // namespace
}  // namespace mfcpg
