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

#include "fedspatial/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fedspatial {

uint64_t HashTag(std::string_view tag) {
  // FNV-1a 64-bit.
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

RngStream DeriveStream(uint64_t master, std::string_view role, uint64_t a,
                       uint64_t b) {
  uint64_t s = Mix64(master ^ HashTag(role));
  s = Mix64(s ^ (a * 0xD6E8FEB86659FD93ULL));
  s = Mix64(s ^ (b * 0xA3B195354A39B70DULL));
  return RngStream(s);
}

double RngStream::NextLaplace(double scale) {
  const double u = NextUnit();
  // Inverse CDF of Laplace(0, b) from one uniform: negative branch for
  // u < 1/2, positive branch otherwise. u is strictly inside (0, 1), so
  // both logs are finite.
  if (u < 0.5) {
    return scale * std::log(2.0 * u);
  }
  return -scale * std::log(2.0 * (1.0 - u));
}

double RngStream::NextGaussian() {
  const double u1 = NextUnit();
  const double u2 = NextUnit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

PrivacyBudget::PrivacyBudget(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("privacy budget epsilon must be positive");
  }
}

LaplaceNoise::LaplaceNoise(double scale_in, RngStream stream_in)
    : scale(scale_in), stream(stream_in) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("laplace scale must be positive");
  }
}

double SampleLaplace(LaplaceNoise& noise) {
  return noise.stream.NextLaplace(noise.scale);
}

}  // namespace fedspatial
