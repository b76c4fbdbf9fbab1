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

#include "mfcpg/random.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfcpg {
namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

inline uint64_t Bits53(uint32_t hi, uint32_t lo) {
  return ((static_cast<uint64_t>(hi) << 32) | lo) >> 11;
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kMul0, ctr[0], hi0, lo0);
    MulHiLo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<uint32_t, 4> SeededStream::Block(const StreamTag& tag) const {
  const std::array<uint32_t, 4> ctr = {
      (static_cast<uint32_t>(tag.purpose) << 24) | (tag.component & 0xFFFFFFu),
      tag.replica, tag.particle, tag.step};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                       static_cast<uint32_t>(seed_ >> 32)};
  return Philox4x32(ctr, key);
}

double SeededStream::Uniform(const StreamTag& tag) const {
  const auto w = Block(tag);
  return static_cast<double>(Bits53(w[0], w[1])) * kTwoPow53Inv;
}

double SeededStream::Normal(const StreamTag& tag) const {
  const auto w = Block(tag);
  const double u1 = (static_cast<double>(Bits53(w[0], w[1])) + 0.5) * kTwoPow53Inv;
  const double u2 = (static_cast<double>(Bits53(w[2], w[3])) + 0.5) * kTwoPow53Inv;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector GaussianIncrement(const SeededStream& stream, StreamTag base, double h,
                         int d) {
  if (h < 0.0) {
    throw std::invalid_argument("gaussian increment: negative step size");
  }
  Vector out(d);
  const double scale = std::sqrt(h);
  for (int c = 0; c < d; ++c) {
    StreamTag tag = base;
    tag.component = base.component + static_cast<uint32_t>(c);
    out[c] = h == 0.0 ? 0.0 : scale * stream.Normal(tag);
  }
  return out;
}

Ensemble UniformEnsemble(const SeededStream& stream, uint32_t replica, int n,
                         int d) {
  Ensemble e(n, d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) {
      StreamTag tag{Purpose::kInitialPosition, replica, static_cast<uint32_t>(i),
                    0, static_cast<uint32_t>(c)};
      e.x(i, c) = stream.Uniform(tag);
      tag.purpose = Purpose::kInitialVelocity;
      e.v(i, c) = stream.Uniform(tag);
    }
  }
  return e;
}

}  // namespace mfcpg
