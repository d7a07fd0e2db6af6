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

#ifndef FEDSPATIAL_GEOMETRY_HPP_
#define FEDSPATIAL_GEOMETRY_HPP_

#include <cstdint>
#include <span>

namespace fedspatial {

// A 2-D point on a planar Euclidean domain. Coordinates must be finite.
struct Location {
  double x = 0.0;
  double y = 0.0;
};

bool IsFinite(const Location& l);

// A range counting query: center plus strictly positive radius. Records at
// distance exactly equal to the radius are NOT counted (strict inequality).
struct RangeQuery {
  Location center;
  double radius = 0.0;
};

void ValidateQuery(const RangeQuery& q);

double Distance(const Location& a, const Location& b);

// Number of records with Distance(record, q.center) < q.radius.
int64_t CountInRange(std::span<const Location> records, const RangeQuery& q);

}  // namespace fedspatial

#endif  // FEDSPATIAL_GEOMETRY_HPP_
