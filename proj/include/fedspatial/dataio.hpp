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

#ifndef FEDSPATIAL_DATAIO_HPP_
#define FEDSPATIAL_DATAIO_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fedspatial/engine.hpp"
#include "fedspatial/silo.hpp"

namespace fedspatial {

// One check-in line: user<TAB>timestamp<TAB>latitude<TAB>longitude<TAB>
// location_id. Timestamp and location id are carried but ignored by the
// geometry; latitude maps to y and longitude to x on the planar domain.
struct CheckinRecord {
  int64_t user_id = 0;
  std::string timestamp;
  double latitude = 0.0;
  double longitude = 0.0;
  int64_t location_id = 0;
};

struct LoadResult {
  std::vector<SpatialSilo> silos;
  GridSpec grid;  // bounding box of the loaded records
  int64_t skipped_lines = 0;
  int64_t loaded_records = 0;
};

// One silo per distinct user id, in order of first appearance, capped at
// limit_owners when positive. Malformed lines are counted and skipped.
// Throws on an unreadable file or when no valid record loads.
LoadResult LoadCheckins(const std::string& path, int limit_owners = 0,
                        int cells_per_axis = 8);

struct SyntheticSpec {
  int m = 100;
  int records_min = 10;
  int records_max = 10;
  int cluster_count = 10;
  double cluster_spread = 1.0;
  double box_min_x = 0.0;
  double box_min_y = 0.0;
  double box_max_x = 45.0;
  double box_max_y = 45.0;
  uint64_t seed = 0;
  int cells_per_axis = 8;
};

void ValidateSyntheticSpec(const SyntheticSpec& spec);

struct SyntheticResult {
  std::vector<SpatialSilo> silos;
  GridSpec grid;
  std::vector<int> cluster_of;  // 1-based owner -> cluster label in [1..k]
};

// Owners are assigned round-robin to clusters; records are drawn from the
// cluster's 2-D Gaussian and clamped to the box. Byte-identical output for
// a fixed spec.
SyntheticResult GenerateSynthetic(const SyntheticSpec& spec);

// Writes silos as check-in lines so generated datasets load through the
// same path as real ones. Cluster labels go to labels_path when non-empty
// (one "owner cluster" line per owner).
void WriteCheckins(const std::string& path,
                   std::span<const SpatialSilo> silos);
void WriteClusterLabels(const std::string& path,
                        std::span<const int> cluster_of);

// Query workload: centers sampled at data records (uniform over the union),
// radius a fixed fraction of the domain diagonal.
std::vector<RangeQuery> GenerateQueries(std::span<const SpatialSilo> silos,
                                        const GridSpec& grid, int count,
                                        double radius_fraction,
                                        RngStream& rng);

// Error metrics over repeated trials. MRE skips trials whose true answer is
// not positive (relative error is undefined at 0); MAE keeps every trial.
struct TrialOutcome {
  double answer = 0.0;
  double true_answer = 0.0;
};

double MeanRelativeError(std::span<const TrialOutcome> trials);
double MeanAbsoluteError(std::span<const TrialOutcome> trials);

// One benchmark cell: (engine, m, epsilon) with aggregated metrics.
struct BenchRow {
  std::string engine;
  int m = 0;
  double epsilon = 0.0;
  int64_t lambda_or_m = 0;
  double mre = 0.0;
  double mae = 0.0;
  double var_emp = 0.0;
  double var_theory = 0.0;
  double wall_ms = 0.0;  // simulated per-query time, deterministic
  int64_t mpc_rounds = 0;
  int64_t mpc_bytes = 0;
  uint64_t seed = 0;
};

extern const char* const kResultsCsvHeader;

void WriteResultsCsv(std::ostream& out, std::span<const BenchRow> rows);
void WriteResultsCsvFile(const std::string& path,
                         std::span<const BenchRow> rows);
std::vector<BenchRow> ReadResultsCsv(std::istream& in);
std::vector<BenchRow> ReadResultsCsvFile(const std::string& path);

}  // namespace fedspatial

#endif  // FEDSPATIAL_DATAIO_HPP_
