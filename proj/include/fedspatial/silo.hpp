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

#ifndef FEDSPATIAL_SILO_HPP_
#define FEDSPATIAL_SILO_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "fedspatial/audit.hpp"
#include "fedspatial/geometry.hpp"
#include "fedspatial/rng.hpp"

namespace fedspatial {

// A uniform grid over a bounding box. Cells are indexed row-major starting
// from the top-left corner (min x, max y) and moving down row by row.
// Records outside the box are clamped into the nearest boundary cell, so
// every record lands in exactly one cell.
struct GridSpec {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;
  int cells_per_axis = 1;

  int CellCount() const { return cells_per_axis * cells_per_axis; }
  int CellIndex(const Location& l) const;
  double Diagonal() const;
};

void ValidateGrid(const GridSpec& grid);

enum class VectorKind { kExact, kNoisy };

// Per-owner grid histogram. Exact vectors hold non-negative integer counts
// summing to the silo size; noisy vectors may carry negative, non-integer
// entries (no clipping or rounding, which would bias the similarity).
struct CountVector {
  std::vector<double> values;
  VectorKind kind = VectorKind::kExact;
  std::optional<double> epsilon_used;
};

// One data owner: an id in [1..m] and a private record set. Records carry
// an optional non-negative attribute used by SUM/AVG queries.
class SpatialSilo {
 public:
  SpatialSilo(int owner_id, std::vector<Location> records,
              std::vector<double> attributes = {});

  int owner_id() const { return owner_id_; }
  const std::vector<Location>& records() const { return records_; }
  const std::vector<double>& attributes() const { return attributes_; }
  bool HasAttributes() const { return !attributes_.empty(); }
  int64_t size() const { return static_cast<int64_t>(records_.size()); }

 private:
  int owner_id_;
  std::vector<Location> records_;
  std::vector<double> attributes_;
};

// Exact grid count vector. Library-internal: never releasable as-is.
CountVector BuildCountVector(const SpatialSilo& silo, const GridSpec& grid);

// Exact vector plus one independent Lap(1/epsilon) draw per cell
// (sensitivity 1 per cell, parallel composition across disjoint cells).
// Releasable; logged to the audit when one is supplied.
CountVector NoisyCountVector(const SpatialSilo& silo, const GridSpec& grid,
                             PrivacyBudget budget, RngStream& rng,
                             ReleaseAudit* audit = nullptr);

// Exact partial range count. NOT releasable.
int64_t PartialCount(const SpatialSilo& silo, const RangeQuery& q);

// Partial count plus one Lap(1/epsilon) draw. Releasable.
double NoisyPartialCount(const SpatialSilo& silo, const RangeQuery& q,
                         PrivacyBudget budget, RngStream& rng,
                         ReleaseAudit* audit = nullptr);

// Sum of min(attribute, theta) over in-range records. Building block for
// SUM queries; per-record sensitivity is theta. NOT releasable.
double TruncatedPartialSum(const SpatialSilo& silo, const RangeQuery& q,
                           double theta);

}  // namespace fedspatial

#endif  // FEDSPATIAL_SILO_HPP_
