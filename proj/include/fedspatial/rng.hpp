// Copyright 2026 The FedSpatial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDSPATIAL_RNG_HPP_
#define FEDSPATIAL_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace fedspatial {

// SplitMix64 finalizer. Used both as the avalanche step of the stream
// generator and to hash role tags / indices into stream seeds.
constexpr uint64_t Mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

uint64_t HashTag(std::string_view tag);

// A deterministic random stream (SplitMix64). Streams are cheap value types;
// every logical task owns its own stream, derived from the master seed via
// DeriveStream(master, role, a, b). Reordering tasks never changes results
// because each stream depends only on its derivation key.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t NextU64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return Mix64(state_);
  }

  // Uniform double strictly inside (0, 1): (k + 0.5) / 2^53.
  double NextUnit() {
    return (static_cast<double>(NextU64() >> 11) + 0.5) *
           (1.0 / 9007199254740992.0);
  }

  // One Laplace(0, scale) draw via the inverse CDF of a single uniform.
  double NextLaplace(double scale);

  // Uniform integer in [0, n).
  uint64_t NextBelow(uint64_t n) { return NextU64() % n; }

  // Standard normal via Box-Muller (two uniforms per pair, second discarded).
  double NextGaussian();

 private:
  uint64_t state_;
};

// Stream derivation: (master seed, role tag, two indices) -> stream.
// Typical keys: ("graph-noise", owner), ("query-noise", trial, owner),
// ("mpc-dealer", trial, pair). Distinct keys give independent streams.
RngStream DeriveStream(uint64_t master, std::string_view role, uint64_t a = 0,
                       uint64_t b = 0);

// The privacy parameter epsilon. Strictly positive and finite.
struct PrivacyBudget {
  double epsilon;
  explicit PrivacyBudget(double eps);
};

// A Laplace noise source: scale b = sensitivity / epsilon plus the stream
// that supplies the uniforms. Var of each draw is 2 b^2.
struct LaplaceNoise {
  double scale;
  RngStream stream;
  LaplaceNoise(double scale_in, RngStream stream_in);
};

double SampleLaplace(LaplaceNoise& noise);

}  // namespace fedspatial

#endif  // FEDSPATIAL_RNG_HPP_
