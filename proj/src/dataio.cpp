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

#include "fedspatial/dataio.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fedspatial {

namespace {

bool ParseDouble(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

bool ParseInt64(const std::string& s, int64_t* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool ParseCheckinLine(const std::string& line, CheckinRecord* rec) {
  const auto fields = SplitTabs(line);
  if (fields.size() != 5) return false;
  if (!ParseInt64(fields[0], &rec->user_id)) return false;
  rec->timestamp = fields[1];
  if (!ParseDouble(fields[2], &rec->latitude)) return false;
  if (!ParseDouble(fields[3], &rec->longitude)) return false;
  if (!ParseInt64(fields[4], &rec->location_id)) return false;
  if (rec->latitude < -90.0 || rec->latitude > 90.0) return false;
  if (rec->longitude < -180.0 || rec->longitude > 180.0) return false;
  return true;
}

GridSpec ExtentGrid(std::span<const SpatialSilo> silos, int cells_per_axis) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();
  for (const SpatialSilo& silo : silos) {
    for (const Location& l : silo.records()) {
      min_x = std::min(min_x, l.x);
      min_y = std::min(min_y, l.y);
      max_x = std::max(max_x, l.x);
      max_y = std::max(max_y, l.y);
    }
  }
  // Pad degenerate extents so the grid box stays valid.
  if (!(max_x > min_x)) {
    min_x -= 0.5;
    max_x += 0.5;
  }
  if (!(max_y > min_y)) {
    min_y -= 0.5;
    max_y += 0.5;
  }
  return GridSpec{min_x, min_y, max_x, max_y, cells_per_axis};
}

}  // namespace

LoadResult LoadCheckins(const std::string& path, int limit_owners,
                        int cells_per_axis) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  std::unordered_map<int64_t, int> owner_of_user;
  std::vector<std::vector<Location>> records;
  LoadResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CheckinRecord rec;
    if (!ParseCheckinLine(line, &rec)) {
      result.skipped_lines += 1;
      continue;
    }
    auto it = owner_of_user.find(rec.user_id);
    if (it == owner_of_user.end()) {
      if (limit_owners > 0 &&
          static_cast<int>(records.size()) >= limit_owners) {
        continue;  // later users beyond the cap are ignored, not malformed
      }
      it = owner_of_user.emplace(rec.user_id,
                                 static_cast<int>(records.size())).first;
      records.emplace_back();
    }
    records[it->second].push_back(Location{rec.longitude, rec.latitude});
    result.loaded_records += 1;
  }
  if (result.loaded_records == 0) {
    throw std::runtime_error("no valid check-in records in " + path);
  }
  result.silos.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    result.silos.emplace_back(static_cast<int>(i) + 1, std::move(records[i]));
  }
  result.grid = ExtentGrid(result.silos, cells_per_axis);
  return result;
}

void ValidateSyntheticSpec(const SyntheticSpec& spec) {
  if (spec.m < 1) throw std::invalid_argument("owner count must be >= 1");
  if (spec.records_min < 1 || spec.records_max < spec.records_min) {
    throw std::invalid_argument("records range must satisfy 1 <= min <= max");
  }
  if (spec.cluster_count < 1 || spec.cluster_count > spec.m) {
    throw std::invalid_argument("cluster count must be in [1, m]");
  }
  if (!(spec.cluster_spread > 0.0)) {
    throw std::invalid_argument("cluster spread must be positive");
  }
  if (!(spec.box_max_x > spec.box_min_x) ||
      !(spec.box_max_y > spec.box_min_y)) {
    throw std::invalid_argument("domain box must be non-degenerate");
  }
  if (spec.cells_per_axis < 1) {
    throw std::invalid_argument("cells per axis must be >= 1");
  }
}

SyntheticResult GenerateSynthetic(const SyntheticSpec& spec) {
  ValidateSyntheticSpec(spec);
  SyntheticResult result;
  result.grid = GridSpec{spec.box_min_x, spec.box_min_y, spec.box_max_x,
                         spec.box_max_y, spec.cells_per_axis};

  RngStream center_rng = DeriveStream(spec.seed, "cluster-centers");
  std::vector<Location> centers(spec.cluster_count);
  for (Location& c : centers) {
    c.x = spec.box_min_x + center_rng.NextUnit() *
                               (spec.box_max_x - spec.box_min_x);
    c.y = spec.box_min_y + center_rng.NextUnit() *
                               (spec.box_max_y - spec.box_min_y);
  }

  result.silos.reserve(spec.m);
  result.cluster_of.assign(spec.m + 1, 0);
  for (int owner = 1; owner <= spec.m; ++owner) {
    const int cluster = (owner - 1) % spec.cluster_count;
    result.cluster_of[owner] = cluster + 1;
    RngStream rng = DeriveStream(spec.seed, "silo-records", owner);
    const int span = spec.records_max - spec.records_min + 1;
    const int count =
        spec.records_min + static_cast<int>(rng.NextBelow(span));
    std::vector<Location> records;
    records.reserve(count);
    for (int k = 0; k < count; ++k) {
      Location l;
      l.x = centers[cluster].x + spec.cluster_spread * rng.NextGaussian();
      l.y = centers[cluster].y + spec.cluster_spread * rng.NextGaussian();
      l.x = std::clamp(l.x, spec.box_min_x, spec.box_max_x);
      l.y = std::clamp(l.y, spec.box_min_y, spec.box_max_y);
      records.push_back(l);
    }
    result.silos.emplace_back(owner, std::move(records));
  }
  return result;
}

void WriteCheckins(const std::string& path,
                   std::span<const SpatialSilo> silos) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  char buf[160];
  for (const SpatialSilo& silo : silos) {
    for (const Location& l : silo.records()) {
      std::snprintf(buf, sizeof(buf),
                    "%d\t2026-01-01T00:00:00Z\t%.9f\t%.9f\t0\n",
                    silo.owner_id(), l.y, l.x);
      out << buf;
    }
  }
}

void WriteClusterLabels(const std::string& path,
                        std::span<const int> cluster_of) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write labels: " + path);
  for (size_t owner = 1; owner < cluster_of.size(); ++owner) {
    out << owner << ' ' << cluster_of[owner] << '\n';
  }
}

std::vector<RangeQuery> GenerateQueries(std::span<const SpatialSilo> silos,
                                        const GridSpec& grid, int count,
                                        double radius_fraction,
                                        RngStream& rng) {
  if (count < 1) throw std::invalid_argument("query count must be >= 1");
  if (!(radius_fraction > 0.0)) {
    throw std::invalid_argument("radius fraction must be positive");
  }
  int64_t total_records = 0;
  for (const SpatialSilo& silo : silos) total_records += silo.size();
  if (total_records == 0) {
    throw std::invalid_argument("cannot sample query centers: no records");
  }
  const double radius = radius_fraction * grid.Diagonal();
  std::vector<RangeQuery> queries;
  queries.reserve(count);
  for (int i = 0; i < count; ++i) {
    int64_t pick = static_cast<int64_t>(
        rng.NextBelow(static_cast<uint64_t>(total_records)));
    for (const SpatialSilo& silo : silos) {
      if (pick < silo.size()) {
        queries.push_back(
            RangeQuery{silo.records()[static_cast<size_t>(pick)], radius});
        break;
      }
      pick -= silo.size();
    }
  }
  return queries;
}

double MeanRelativeError(std::span<const TrialOutcome> trials) {
  double sum = 0.0;
  int64_t n = 0;
  for (const TrialOutcome& t : trials) {
    if (!(t.true_answer > 0.0)) continue;
    sum += std::abs(t.answer - t.true_answer) / t.true_answer;
    ++n;
  }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(n);
}

double MeanAbsoluteError(std::span<const TrialOutcome> trials) {
  if (trials.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const TrialOutcome& t : trials) {
    sum += std::abs(t.answer - t.true_answer);
  }
  return sum / static_cast<double>(trials.size());
}

const char* const kResultsCsvHeader =
    "engine,m,epsilon,lambda_or_m,mre,mae,var_emp,var_theory,wall_ms,"
    "mpc_rounds,mpc_bytes,seed";

void WriteResultsCsv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kResultsCsvHeader << '\n';
  char buf[512];
  for (const BenchRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%.6g,%" PRId64 ",%.6f,%.6f,%.6f,%.6f,%.3f,%" PRId64
                  ",%" PRId64 ",%" PRIu64 "\n",
                  r.engine.c_str(), r.m, r.epsilon, r.lambda_or_m, r.mre,
                  r.mae, r.var_emp, r.var_theory, r.wall_ms, r.mpc_rounds,
                  r.mpc_bytes, r.seed);
    out << buf;
  }
}

void WriteResultsCsvFile(const std::string& path,
                         std::span<const BenchRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results: " + path);
  WriteResultsCsv(out, rows);
}

std::vector<BenchRow> ReadResultsCsv(std::istream& in) {
  std::vector<BenchRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw std::runtime_error("results csv: bad header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 12) {
      throw std::runtime_error("results csv: bad row: " + line);
    }
    BenchRow r;
    r.engine = fields[0];
    r.m = static_cast<int>(std::strtol(fields[1].c_str(), nullptr, 10));
    r.epsilon = std::strtod(fields[2].c_str(), nullptr);
    r.lambda_or_m = std::strtoll(fields[3].c_str(), nullptr, 10);
    r.mre = std::strtod(fields[4].c_str(), nullptr);
    r.mae = std::strtod(fields[5].c_str(), nullptr);
    r.var_emp = std::strtod(fields[6].c_str(), nullptr);
    r.var_theory = std::strtod(fields[7].c_str(), nullptr);
    r.wall_ms = std::strtod(fields[8].c_str(), nullptr);
    r.mpc_rounds = std::strtoll(fields[9].c_str(), nullptr, 10);
    r.mpc_bytes = std::strtoll(fields[10].c_str(), nullptr, 10);
    r.seed = std::strtoull(fields[11].c_str(), nullptr, 10);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<BenchRow> ReadResultsCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results: " + path);
  return ReadResultsCsv(in);
}

}  // namespace fedspatial
