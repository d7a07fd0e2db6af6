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

#include "fedspatial/silo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedspatial {

void ValidateGrid(const GridSpec& grid) {
  if (!(grid.max_x > grid.min_x) || !(grid.max_y > grid.min_y)) {
    throw std::invalid_argument("grid bounding box must be non-degenerate");
  }
  if (grid.cells_per_axis < 1) {
    throw std::invalid_argument("grid needs at least one cell per axis");
  }
}

int GridSpec::CellIndex(const Location& l) const {
  const int n = cells_per_axis;
  const double cell_w = (max_x - min_x) / n;
  const double cell_h = (max_y - min_y) / n;
  int col = static_cast<int>(std::floor((l.x - min_x) / cell_w));
  int row = static_cast<int>(std::floor((max_y - l.y) / cell_h));
  col = std::clamp(col, 0, n - 1);
  row = std::clamp(row, 0, n - 1);
  return row * n + col;
}

double GridSpec::Diagonal() const {
  const double dx = max_x - min_x;
  const double dy = max_y - min_y;
  return std::sqrt(dx * dx + dy * dy);
}

SpatialSilo::SpatialSilo(int owner_id, std::vector<Location> records,
                         std::vector<double> attributes)
    : owner_id_(owner_id),
      records_(std::move(records)),
      attributes_(std::move(attributes)) {
  if (owner_id_ < 1) {
    throw std::invalid_argument("owner id must be >= 1");
  }
  for (const Location& l : records_) {
    if (!IsFinite(l)) throw std::invalid_argument("record must be finite");
  }
  if (!attributes_.empty()) {
    if (attributes_.size() != records_.size()) {
      throw std::invalid_argument("one attribute per record required");
    }
    for (double a : attributes_) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument("attributes must be non-negative");
      }
    }
  }
}

CountVector BuildCountVector(const SpatialSilo& silo, const GridSpec& grid) {
  ValidateGrid(grid);
  CountVector v;
  v.kind = VectorKind::kExact;
  v.values.assign(grid.CellCount(), 0.0);
  for (const Location& l : silo.records()) {
    v.values[grid.CellIndex(l)] += 1.0;
  }
  return v;
}

CountVector NoisyCountVector(const SpatialSilo& silo, const GridSpec& grid,
                             PrivacyBudget budget, RngStream& rng,
                             ReleaseAudit* audit) {
  CountVector v = BuildCountVector(silo, grid);
  const double scale = 1.0 / budget.epsilon;
  for (double& entry : v.values) {
    entry += rng.NextLaplace(scale);
  }
  v.kind = VectorKind::kNoisy;
  v.epsilon_used = budget.epsilon;
  if (audit != nullptr) {
    audit->Record(silo.owner_id(), ReleaseKind::kNoisyVector, budget.epsilon);
  }
  return v;
}

int64_t PartialCount(const SpatialSilo& silo, const RangeQuery& q) {
  ValidateQuery(q);
  return CountInRange(silo.records(), q);
}

double NoisyPartialCount(const SpatialSilo& silo, const RangeQuery& q,
                         PrivacyBudget budget, RngStream& rng,
                         ReleaseAudit* audit) {
  const double noisy = static_cast<double>(PartialCount(silo, q)) +
                       rng.NextLaplace(1.0 / budget.epsilon);
  if (audit != nullptr) {
    audit->Record(silo.owner_id(), ReleaseKind::kNoisyScalar, budget.epsilon);
  }
  return noisy;
}

double TruncatedPartialSum(const SpatialSilo& silo, const RangeQuery& q,
                           double theta) {
  ValidateQuery(q);
  if (!(theta > 0.0)) {
    throw std::invalid_argument("truncation parameter theta must be > 0");
  }
  if (!silo.HasAttributes()) {
    throw std::invalid_argument("records carry no attribute to sum");
  }
  const double r2 = q.radius * q.radius;
  double sum = 0.0;
  const auto& records = silo.records();
  const auto& attrs = silo.attributes();
  for (size_t i = 0; i < records.size(); ++i) {
    const double dx = records[i].x - q.center.x;
    const double dy = records[i].y - q.center.y;
    if (dx * dx + dy * dy < r2) {
      sum += std::min(attrs[i], theta);
    }
  }
  return sum;
}

}  // namespace fedspatial
