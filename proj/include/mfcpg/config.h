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

#ifndef MFCPG_CONFIG_H_
#define MFCPG_CONFIG_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mfcpg/dynamics.h"
#include "mfcpg/experiments.h"
#include "mfcpg/mlp.h"
#include "mfcpg/optim.h"

namespace mfcpg {

// Resolved run configuration. Defaults reproduce the beta = 0, d = 1
// experiment: T = 1, Phi = 1, sigma = gamma1 = 0.1, N = 1000, M = 128,
// K = 800, Adam at lr 0.001 decayed by 0.617 every 50 iterations, two hidden
// layers of width 110.
struct Config {
  // [model]
  CsParams cs;
  // [train]
  int N = 1000;
  int M = 128;
  int K = 800;
  uint64_t seed = 1;
  LrSchedule lr;
  int hidden = 110;
  int layers = 2;
  Activation activation = Activation::kRelu;
  // [riccati]
  int riccati_steps = 4096;
  // [evaluate]
  int eval_N = 10000;
  int eval_M = 256;
  int eval_reps = 8;
  // [converge]
  std::vector<int> conv_M_list = {4, 8, 16, 32, 64, 128};
  int conv_N = 10000;
  int conv_reps = 8;
  std::string conv_protocol = "exact";  // exact | trained

  bool operator==(const Config&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what);

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

// Parses `key = value` lines. `#` starts a comment; `[section]` headers group
// keys and a key inside a section must belong to it. Unknown keys, duplicate
// keys, malformed values and violated bounds throw ConfigError.
Config ParseConfig(std::string_view text);
Config LoadConfig(const std::string& path);

// Every key, grouped by section; ParseConfig(RenderConfig(c)) == c.
std::string RenderConfig(const Config& c);

TrainConfig ToTrainConfig(const Config& c);

}  // namespace mfcpg

#endif  // MFCPG_CONFIG_H_
