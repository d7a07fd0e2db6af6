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

#include <vector>

#include "fedspatial/silo.hpp"
#include "test_util.hpp"

using namespace fedspatial;

TEST_CASE("count vector matches the worked example") {
  const auto silo = testutil::SiloFromVector(1, testutil::ExampleVectors()[0]);
  const CountVector v = BuildCountVector(silo, testutil::ExampleGrid());
  const std::vector<double> expected{0, 1, 1, 1, 0, 0, 2, 5, 0};
  CHECK(v.values == expected);
  CHECK(v.kind == VectorKind::kExact);
}

TEST_CASE("count vector basics") {
  const GridSpec grid = testutil::ExampleGrid();
  const SpatialSilo empty(1, {});
  for (double entry : BuildCountVector(empty, grid).values) {
    CHECK(entry == 0.0);
  }

  const SpatialSilo five(2, std::vector<Location>(5, Location{1.0, 1.0}));
  const GridSpec one_cell{0, 0, 3, 3, 1};
  CHECK(BuildCountVector(five, one_cell).values ==
        std::vector<double>{5.0});
}

TEST_CASE("records outside the box are clamped into edge cells") {
  const GridSpec grid = testutil::ExampleGrid();
  const SpatialSilo silo(1, {{-10.0, -10.0}, {10.0, 10.0}, {1.5, 99.0}});
  const CountVector v = BuildCountVector(silo, grid);
  double sum = 0.0;
  for (double entry : v.values) sum += entry;
  CHECK(sum == 3.0);
  CHECK(v.values[6] == 1.0);  // bottom-left
  CHECK(v.values[2] == 1.0);  // top-right
  CHECK(v.values[1] == 1.0);  // clamped onto the top row
}

TEST_CASE("count vector entries sum to the silo size") {
  RngStream rng(31);
  const GridSpec grid{0, 0, 10, 10, 4};
  for (int i = 0; i < 50; ++i) {
    std::vector<Location> records;
    const int n = static_cast<int>(rng.NextBelow(40));
    for (int k = 0; k < n; ++k) {
      records.push_back({rng.NextUnit() * 14 - 2, rng.NextUnit() * 14 - 2});
    }
    const SpatialSilo silo(1, records);
    double sum = 0.0;
    for (double entry : BuildCountVector(silo, grid).values) sum += entry;
    CHECK(sum == static_cast<double>(n));
  }
}

TEST_CASE("adding or removing one record moves exactly one entry by one") {
  RngStream rng(32);
  const GridSpec grid{0, 0, 10, 10, 4};
  for (int i = 0; i < 100; ++i) {
    std::vector<Location> records;
    const int n = 1 + static_cast<int>(rng.NextBelow(30));
    for (int k = 0; k < n; ++k) {
      records.push_back({rng.NextUnit() * 10, rng.NextUnit() * 10});
    }
    const CountVector before =
        BuildCountVector(SpatialSilo(1, records), grid);
    std::vector<Location> changed = records;
    if (rng.NextBelow(2) == 0) {
      changed.push_back({rng.NextUnit() * 10, rng.NextUnit() * 10});
    } else {
      changed.erase(changed.begin() +
                    static_cast<int>(rng.NextBelow(changed.size())));
    }
    const CountVector after =
        BuildCountVector(SpatialSilo(1, changed), grid);
    int changed_entries = 0;
    for (size_t t = 0; t < before.values.size(); ++t) {
      const double diff = after.values[t] - before.values[t];
      if (diff != 0.0) {
        ++changed_entries;
        CHECK(std::abs(diff) == 1.0);
      }
    }
    CHECK(changed_entries == 1);
  }
}

TEST_CASE("noisy vector variance follows the laplace oracle") {
  const auto silo = testutil::SiloFromVector(1, testutil::ExampleVectors()[0]);
  const GridSpec grid = testutil::ExampleGrid();
  const CountVector exact = BuildCountVector(silo, grid);
  const double eps = 0.5;
  const int reps = 100000;
  RngStream rng = DeriveStream(12345, "graph-noise", 1);
  double sq_sum = 0.0;
  double sum = 0.0;
  int64_t n = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const CountVector noisy =
        NoisyCountVector(silo, grid, PrivacyBudget(eps), rng);
    CHECK(noisy.kind == VectorKind::kNoisy);
    for (size_t t = 0; t < noisy.values.size(); ++t) {
      const double d = noisy.values[t] - exact.values[t];
      sum += d;
      sq_sum += d * d;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  const double var =
      sq_sum / static_cast<double>(n) - mean * mean;
  const double expected = 2.0 / (eps * eps);
  CHECK(var > expected * 0.97);
  CHECK(var < expected * 1.03);
}

TEST_CASE("noisy vector converges to exact at huge epsilon") {
  const auto silo = testutil::SiloFromVector(1, testutil::ExampleVectors()[0]);
  const GridSpec grid = testutil::ExampleGrid();
  const CountVector exact = BuildCountVector(silo, grid);
  RngStream rng(77);
  const CountVector noisy =
      NoisyCountVector(silo, grid, PrivacyBudget(1e6), rng);
  CHECK(noisy.epsilon_used == 1e6);
  for (size_t t = 0; t < exact.values.size(); ++t) {
    CHECK(std::abs(noisy.values[t] - exact.values[t]) < 0.01);
  }
}

TEST_CASE("noisy vector is deterministic per seed and audited") {
  const auto silo = testutil::SiloFromVector(3, testutil::ExampleVectors()[2]);
  const GridSpec grid = testutil::ExampleGrid();
  ReleaseAudit audit;
  RngStream rng_a = DeriveStream(9, "graph-noise", 3);
  RngStream rng_b = DeriveStream(9, "graph-noise", 3);
  const CountVector a =
      NoisyCountVector(silo, grid, PrivacyBudget(0.3), rng_a, &audit);
  const CountVector b =
      NoisyCountVector(silo, grid, PrivacyBudget(0.3), rng_b);
  CHECK(a.values == b.values);
  REQUIRE(audit.entries().size() == 1);
  CHECK(audit.entries()[0].owner == 3);
  CHECK(audit.entries()[0].kind == ReleaseKind::kNoisyVector);
  CHECK(audit.entries()[0].epsilon == 0.3);
  CHECK(audit.ScanViolations().empty());
}

TEST_CASE("partial counts on the toy silos") {
  const auto silos = testutil::ToyFederationSilos();
  CHECK(PartialCount(silos[0], testutil::ToyQuery()) == 3);
  CHECK(PartialCount(silos[1], testutil::ToyQuery()) == 2);
  CHECK(PartialCount(SpatialSilo(3, {}), testutil::ToyQuery()) == 0);
}

TEST_CASE("noisy partial count is unbiased with oracle variance") {
  const auto silos = testutil::ToyFederationSilos();
  const double eps = 1.0;
  const int reps = 100000;
  std::vector<double> draws(reps);
  RngStream rng = DeriveStream(55, "query-noise", 1);
  for (int rep = 0; rep < reps; ++rep) {
    draws[rep] =
        NoisyPartialCount(silos[0], testutil::ToyQuery(), PrivacyBudget(eps),
                          rng);
  }
  const double mean = testutil::Mean(draws);
  const double var = testutil::Variance(draws);
  CHECK(std::abs(mean - 3.0) < 0.05);
  const double expected = 2.0 / (eps * eps);
  CHECK(var > expected * 0.97);
  CHECK(var < expected * 1.03);
}

TEST_CASE("noisy partial count converges at huge epsilon and is audited") {
  const auto silos = testutil::ToyFederationSilos();
  ReleaseAudit audit;
  RngStream rng(101);
  const double noisy = NoisyPartialCount(silos[0], testutil::ToyQuery(),
                                         PrivacyBudget(1e6), rng, &audit);
  CHECK(std::abs(noisy - 3.0) < 0.01);
  REQUIRE(audit.entries().size() == 1);
  CHECK(audit.entries()[0].kind == ReleaseKind::kNoisyScalar);
}

TEST_CASE("truncated partial sum") {
  const SpatialSilo silo(1, {{0.1, 0.0}, {0.2, 0.0}, {9.0, 9.0}},
                         {5.0, 12.0, 100.0});
  const RangeQuery q{{0, 0}, 1.0};
  CHECK(TruncatedPartialSum(silo, q, 10.0) == 15.0);          // 5 + min(12,10)
  CHECK(TruncatedPartialSum(silo, q, 1e12) == 17.0);          // plain sum
  CHECK_THROWS_AS(TruncatedPartialSum(silo, q, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedPartialSum(silo, q, -3.0), std::invalid_argument);

  const SpatialSilo no_attrs(2, {{0.0, 0.0}});
  CHECK_THROWS_AS(TruncatedPartialSum(no_attrs, q, 1.0),
                  std::invalid_argument);
}

TEST_CASE("truncated partial sum matches a naive oracle") {
  RngStream rng(66);
  for (int i = 0; i < 50; ++i) {
    std::vector<Location> records;
    std::vector<double> attrs;
    const int n = 1 + static_cast<int>(rng.NextBelow(30));
    for (int k = 0; k < n; ++k) {
      records.push_back({rng.NextUnit() * 4 - 2, rng.NextUnit() * 4 - 2});
      attrs.push_back(rng.NextUnit() * 20);
    }
    const SpatialSilo silo(1, records, attrs);
    const RangeQuery q{{0, 0}, 0.5 + rng.NextUnit()};
    const double theta = 0.5 + rng.NextUnit() * 15;

    double naive = 0.0;
    for (int k = 0; k < n; ++k) {
      if (Distance(records[k], q.center) < q.radius) {
        naive += std::min(attrs[k], theta);
      }
    }
    CHECK(TruncatedPartialSum(silo, q, theta) ==
          doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("silo construction validation") {
  CHECK_THROWS_AS(SpatialSilo(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(SpatialSilo(1, {{0, 0}}, {1.0, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpatialSilo(1, {{0, 0}}, {-1.0}), std::invalid_argument);
  const GridSpec bad{0, 0, 0, 1, 3};
  CHECK_THROWS_AS(ValidateGrid(bad), std::invalid_argument);
}
