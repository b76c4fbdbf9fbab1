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

#include "mfcpg/generic_problem.h"

#include <stdexcept>

namespace mfcpg {

EmpiricalLaw MakeEmpiricalLaw(const ParticleArray& states,
                              const ParticleArray* controls) {
  if (states.rows() < 1) {
    throw std::invalid_argument("empirical law: no samples");
  }
  if (controls != nullptr && controls->rows() != states.rows()) {
    throw std::invalid_argument("empirical law: state/control sample counts differ");
  }
  EmpiricalLaw law;
  law.states = &states;
  law.controls = controls;
  law.mean_state = ColumnMean(states);
  if (controls != nullptr) law.mean_control = ColumnMean(*controls);
  return law;
}

}  // namespace mfcpg
