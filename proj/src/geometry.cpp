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

#include "fedspatial/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fedspatial {

bool IsFinite(const Location& l) {
  return std::isfinite(l.x) && std::isfinite(l.y);
}

void ValidateQuery(const RangeQuery& q) {
  if (!IsFinite(q.center)) {
    throw std::invalid_argument("query center must be finite");
  }
  if (!(q.radius > 0.0) || !std::isfinite(q.radius)) {
    throw std::invalid_argument("query radius must be positive");
  }
}

double Distance(const Location& a, const Location& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

int64_t CountInRange(std::span<const Location> records, const RangeQuery& q) {
  const double r2 = q.radius * q.radius;
  int64_t count = 0;
  for (const Location& l : records) {
    const double dx = l.x - q.center.x;
    const double dy = l.y - q.center.y;
    if (dx * dx + dy * dy < r2) ++count;
  }
  return count;
}

}  // namespace fedspatial
