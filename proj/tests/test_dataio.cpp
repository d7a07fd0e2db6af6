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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fedspatial/dataio.hpp"
#include "fedspatial/simgraph.hpp"
#include "fedspatial/grouping.hpp"
#include "test_util.hpp"

using namespace fedspatial;

namespace {

std::string WriteTempFile(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

std::string ReadWholeFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("load_checkins on a small fixture") {
  const std::string path = WriteTempFile(
      "fsp_checkins.tsv",
      "7\t2010-10-19T23:55:27Z\t30.23\t-97.79\t22847\n"
      "7\t2010-10-18T22:17:43Z\t30.26\t-97.76\t420315\n"
      "9\t2010-10-17T23:42:03Z\t30.25\t-97.75\t316637\n");
  const LoadResult result = LoadCheckins(path);
  REQUIRE(result.silos.size() == 2);
  CHECK(result.silos[0].owner_id() == 1);
  CHECK(result.silos[0].size() == 2);
  CHECK(result.silos[1].size() == 1);
  CHECK(result.skipped_lines == 0);
  // Longitude maps to x, latitude to y.
  CHECK(result.silos[0].records()[0].x == doctest::Approx(-97.79));
  CHECK(result.silos[0].records()[0].y == doctest::Approx(30.23));
  // Grid box covers the data extent.
  CHECK(result.grid.min_x <= -97.79);
  CHECK(result.grid.max_x >= -97.75);
}

TEST_CASE("load_checkins caps owners and skips malformed lines") {
  const std::string path = WriteTempFile(
      "fsp_checkins_bad.tsv",
      "1\tt\t10.0\t20.0\t5\n"
      "not a record at all\n"
      "2\tt\t95.5\t20.0\t5\n"     // latitude out of range
      "3\tt\t11.0\tlon\t5\n"      // unparseable longitude
      "4\tt\t12.0\t21.0\t5\n"
      "1\tt\t13.0\t22.0\t5\n");
  const LoadResult all = LoadCheckins(path);
  CHECK(all.silos.size() == 2);  // users 1 and 4
  CHECK(all.skipped_lines == 3);
  CHECK(all.silos[0].size() == 2);

  const LoadResult capped = LoadCheckins(path, /*limit_owners=*/1);
  CHECK(capped.silos.size() == 1);
  CHECK(capped.silos[0].size() == 2);  // both lines of user 1
}

TEST_CASE("load_checkins error paths") {
  CHECK_THROWS_AS(LoadCheckins("/nonexistent/file.tsv"), std::runtime_error);
  const std::string empty = WriteTempFile("fsp_empty.tsv", "garbage\n");
  CHECK_THROWS_AS(LoadCheckins(empty), std::runtime_error);
}

TEST_CASE("load_checkins ordering is stable") {
  const std::string path = WriteTempFile(
      "fsp_checkins_order.tsv",
      "50\tt\t1.0\t1.0\t0\n"
      "20\tt\t2.0\t2.0\t0\n"
      "50\tt\t3.0\t3.0\t0\n");
  const LoadResult a = LoadCheckins(path);
  const LoadResult b = LoadCheckins(path);
  REQUIRE(a.silos.size() == 2);
  // First appearance wins the first owner id.
  CHECK(a.silos[0].size() == 2);
  CHECK(b.silos[0].records()[1].y == a.silos[0].records()[1].y);
}

TEST_CASE("synthetic generation is deterministic") {
  SyntheticSpec spec;
  spec.m = 30;
  spec.records_min = 5;
  spec.records_max = 9;
  spec.cluster_count = 6;
  spec.seed = 7070;
  const SyntheticResult a = GenerateSynthetic(spec);
  const SyntheticResult b = GenerateSynthetic(spec);
  REQUIRE(a.silos.size() == 30);
  for (int i = 0; i < 30; ++i) {
    REQUIRE(a.silos[i].size() == b.silos[i].size());
    for (int64_t k = 0; k < a.silos[i].size(); ++k) {
      CHECK(a.silos[i].records()[k].x == b.silos[i].records()[k].x);
      CHECK(a.silos[i].records()[k].y == b.silos[i].records()[k].y);
    }
  }
  // Round-robin cluster labels.
  CHECK(a.cluster_of[1] == 1);
  CHECK(a.cluster_of[2] == 2);
  CHECK(a.cluster_of[7] == 1);
}

TEST_CASE("one cluster makes a near-complete exact graph") {
  SyntheticSpec spec;
  spec.m = 20;
  // Enough records that the multinomial split across cells concentrates:
  // even with the cluster center on a cell boundary, all owners share the
  // same split proportions up to a few percent.
  spec.records_min = spec.records_max = 600;
  spec.cluster_count = 1;
  spec.cluster_spread = 0.3;
  spec.box_max_x = spec.box_max_y = 40.0;
  spec.seed = 31337;
  const SyntheticResult fed = GenerateSynthetic(spec);
  const SimilarityGraph graph = BuildExactGraph(fed.silos, fed.grid, 0.5);
  CHECK(graph.edge_count() == 20 * 19 / 2);
  for (const GraphEdge& e : graph.edges()) CHECK(e.weight > 0.9);
}

TEST_CASE("well-separated per-owner clusters give lambda near m") {
  SyntheticSpec spec;
  spec.m = 12;
  spec.records_min = spec.records_max = 40;
  spec.cluster_count = 12;
  spec.cluster_spread = 0.05;
  spec.box_max_x = spec.box_max_y = 1000.0;
  spec.cells_per_axis = 16;
  spec.seed = 99901;
  const SyntheticResult fed = GenerateSynthetic(spec);
  const SimilarityGraph graph = BuildExactGraph(fed.silos, fed.grid, 0.5);
  const Grouping grouping = GreedyGroup(graph);
  CHECK(grouping.lambda >= 11);  // collisions are possible but rare
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec spec;
  spec.m = 0;
  CHECK_THROWS_AS(GenerateSynthetic(spec), std::invalid_argument);
  spec.m = 5;
  spec.cluster_count = 9;
  CHECK_THROWS_AS(GenerateSynthetic(spec), std::invalid_argument);
  spec.cluster_count = 2;
  spec.records_min = 3;
  spec.records_max = 2;
  CHECK_THROWS_AS(GenerateSynthetic(spec), std::invalid_argument);
}

TEST_CASE("check-in writer round trips through the loader") {
  SyntheticSpec spec;
  spec.m = 8;
  spec.records_min = spec.records_max = 4;
  spec.cluster_count = 2;
  spec.seed = 555;
  const SyntheticResult fed = GenerateSynthetic(spec);
  const auto path = std::filesystem::temp_directory_path() / "fsp_rt.tsv";
  WriteCheckins(path.string(), fed.silos);
  const LoadResult loaded = LoadCheckins(path.string());
  REQUIRE(loaded.silos.size() == 8);
  for (int i = 0; i < 8; ++i) {
    REQUIRE(loaded.silos[i].size() == fed.silos[i].size());
    for (int64_t k = 0; k < loaded.silos[i].size(); ++k) {
      CHECK(std::abs(loaded.silos[i].records()[k].x -
                     fed.silos[i].records()[k].x) < 1e-8);
    }
  }
}

TEST_CASE("query workload samples record centers") {
  SyntheticSpec spec;
  spec.m = 10;
  spec.records_min = spec.records_max = 5;
  spec.cluster_count = 2;
  spec.seed = 777;
  const SyntheticResult fed = GenerateSynthetic(spec);
  RngStream rng(1);
  const auto queries = GenerateQueries(fed.silos, fed.grid, 25, 0.05, rng);
  REQUIRE(queries.size() == 25);
  const double diag = fed.grid.Diagonal();
  for (const RangeQuery& q : queries) {
    CHECK(q.radius == doctest::Approx(0.05 * diag));
    bool found = false;
    for (const auto& silo : fed.silos) {
      for (const auto& rec : silo.records()) {
        if (rec.x == q.center.x && rec.y == q.center.y) found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("error metrics match a hand oracle and skip zero truths in mre") {
  const std::vector<TrialOutcome> trials{
      {12.0, 10.0}, {9.0, 10.0}, {10.0, 0.0}};
  // MRE: (2/10 + 1/10) / 2 over the two positive-truth trials.
  CHECK(MeanRelativeError(trials) == doctest::Approx(0.15));
  // MAE keeps all three: (2 + 1 + 10) / 3.
  CHECK(MeanAbsoluteError(trials) == doctest::Approx(13.0 / 3.0));
  CHECK(std::isnan(MeanRelativeError({})));
}

TEST_CASE("results csv writes, parses, and stays deterministic") {
  std::vector<BenchRow> rows(2);
  rows[0] = BenchRow{"dp", 500, 0.3, 500, 0.81, 75.25, 11111.5, 11111.11,
                     0.0, 0, 0, 42};
  rows[1] = BenchRow{"fedgroup", 500, 0.3, 25, 0.55, 51.5, 555.25, 555.55,
                     12.0, 475, 7600, 43};
  std::stringstream buffer;
  WriteResultsCsv(buffer, rows);
  const std::string text = buffer.str();
  CHECK(text.find("engine,m,epsilon,lambda_or_m,mre,mae,var_emp,var_theory,"
                  "wall_ms,mpc_rounds,mpc_bytes,seed\n") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  const std::vector<BenchRow> parsed = ReadResultsCsv(buffer);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].engine == "dp");
  CHECK(parsed[0].m == 500);
  CHECK(parsed[0].epsilon == doctest::Approx(0.3));
  CHECK(parsed[0].mae == doctest::Approx(75.25));
  CHECK(parsed[1].lambda_or_m == 25);
  CHECK(parsed[1].seed == 43);

  std::stringstream again;
  WriteResultsCsv(again, parsed);
  CHECK(again.str() == text);
}

TEST_CASE("results csv file helpers and header validation") {
  const auto path =
      (std::filesystem::temp_directory_path() / "fsp_results.csv").string();
  std::vector<BenchRow> rows(1);
  rows[0].engine = "mpc";
  rows[0].m = 100;
  rows[0].epsilon = 0.2;
  WriteResultsCsvFile(path, rows);
  CHECK(ReadResultsCsvFile(path).size() == 1);
  CHECK(ReadWholeFile(path).rfind("engine,", 0) == 0);

  std::stringstream bad("wrong,header\n");
  CHECK_THROWS_AS(ReadResultsCsv(bad), std::runtime_error);
}
