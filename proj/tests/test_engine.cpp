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
#include <vector>

#include "fedspatial/dataio.hpp"
#include "fedspatial/engine.hpp"
#include "test_util.hpp"

using namespace fedspatial;

namespace {

Federation ToyFederation() {
  Federation fed;
  fed.silos = testutil::ToyFederationSilos();
  fed.grid = GridSpec{-5, -5, 6, 6, 4};
  return fed;
}

// m silos of a few records each near the origin, all inside the unit query.
Federation SmallFederation(int m, uint64_t seed, int records_per_silo = 3) {
  Federation fed;
  RngStream rng(seed);
  for (int owner = 1; owner <= m; ++owner) {
    std::vector<Location> records;
    std::vector<double> attrs;
    for (int k = 0; k < records_per_silo; ++k) {
      records.push_back({rng.NextUnit() - 0.5, rng.NextUnit() - 0.5});
      attrs.push_back(1.0 + rng.NextUnit() * 9.0);
    }
    fed.silos.emplace_back(owner, std::move(records), std::move(attrs));
  }
  fed.grid = GridSpec{-1, -1, 1, 1, 4};
  return fed;
}

Grouping UniformGrouping(int m, int group_size) {
  Grouping grouping;
  grouping.group_of.assign(m + 1, 0);
  for (int u = 1; u <= m; ++u) {
    grouping.group_of[u] = (u - 1) / group_size + 1;
  }
  grouping.lambda = (m + group_size - 1) / group_size;
  return grouping;
}

struct VarianceEstimate {
  double var = 0.0;
  double half_width_99 = 0.0;  // normal-approx 99% half width
};

VarianceEstimate ErrorVariance(std::vector<double>& errors) {
  const double var = testutil::Variance(errors);
  const double mean = testutil::Mean(errors);
  double fourth = 0.0;
  for (double e : errors) {
    fourth += std::pow(e - mean, 4.0);
  }
  fourth /= static_cast<double>(errors.size());
  const double var_of_var =
      (fourth - var * var) / static_cast<double>(errors.size());
  VarianceEstimate est;
  est.var = var;
  est.half_width_99 = 2.576 * std::sqrt(std::max(var_of_var, 0.0));
  return est;
}

}  // namespace

TEST_CASE("plaintext engine sums the partial answers") {
  Federation fed = ToyFederation();
  const QueryResult res = AnswerPlaintext(fed, testutil::ToyQuery());
  CHECK(res.answer == 5.0);  // 3 + 2
  CHECK(res.true_answer == 5.0);
  CHECK(res.lambda_or_m == 0);
  CHECK(res.epsilon_query == 0.0);

  Federation empty;
  empty.grid = GridSpec{0, 0, 1, 1, 1};
  CHECK(AnswerPlaintext(empty, testutil::ToyQuery()).answer == 0.0);
}

TEST_CASE("plaintext engine matches a flat union scan") {
  RngStream rng(404);
  for (int i = 0; i < 20; ++i) {
    Federation fed = SmallFederation(8, 500 + i, 6);
    const RangeQuery q{{rng.NextUnit() - 0.5, rng.NextUnit() - 0.5},
                       0.2 + rng.NextUnit()};
    std::vector<Location> all;
    for (const auto& silo : fed.silos) {
      all.insert(all.end(), silo.records().begin(), silo.records().end());
    }
    CHECK(AnswerPlaintext(fed, q).answer ==
          static_cast<double>(CountInRange(all, q)));
  }
}

TEST_CASE("dp baseline: unbiased with variance 2m/eps^2") {
  Federation fed = SmallFederation(50, 3131);
  const RangeQuery q{{0, 0}, 1.0};
  const double eps = 0.5;
  const double truth = AnswerPlaintext(fed, q).answer;
  const int trials = 5000;
  std::vector<double> errors(trials);
  EngineOptions options;
  options.master_seed = 91;
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    const QueryResult res =
        AnswerDpBaseline(fed, q, PrivacyBudget(eps), options);
    CHECK(res.lambda_or_m == 50);
    CHECK(res.true_answer == truth);
    errors[t] = res.answer - truth;
  }
  const double expected = 2.0 * 50 / (eps * eps);
  const double var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);
  // Unbiasedness z-test at the 1% level.
  const double z = testutil::Mean(errors) /
                   std::sqrt(var / static_cast<double>(trials));
  CHECK(std::abs(z) < 2.576);
}

TEST_CASE("dp baseline converges at huge epsilon") {
  Federation fed = ToyFederation();
  EngineOptions options;
  options.master_seed = 5;
  const QueryResult res =
      AnswerDpBaseline(fed, testutil::ToyQuery(), PrivacyBudget(1e7),
                       options);
  CHECK(std::abs(res.answer - 5.0) < 0.01);
}

TEST_CASE("mpc baseline: one noise instance, chain costs") {
  Federation fed = SmallFederation(40, 99);
  const RangeQuery q{{0, 0}, 1.0};
  const double eps = 0.5;
  const double truth = AnswerPlaintext(fed, q).answer;
  const int trials = 5000;
  std::vector<double> errors(trials);
  EngineOptions options;
  options.master_seed = 92;
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    const QueryResult res =
        AnswerMpcBaseline(fed, q, PrivacyBudget(eps), options);
    CHECK(res.lambda_or_m == 1);
    REQUIRE(res.mpc_cost.has_value());
    CHECK(res.mpc_cost->rounds == 39);  // m - 1
    errors[t] = res.answer - truth;
  }
  const double expected = 2.0 / (eps * eps);
  const double var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);
  const double z = testutil::Mean(errors) /
                   std::sqrt(var / static_cast<double>(trials));
  CHECK(std::abs(z) < 2.576);
}

TEST_CASE("fedgroup: variance follows 2*lambda/eps^2") {
  Federation fed = SmallFederation(20, 71);
  fed.grouping = UniformGrouping(20, 10);  // lambda = 2
  const RangeQuery q{{0, 0}, 1.0};
  const double eps = 0.3;
  const double truth = AnswerPlaintext(fed, q).answer;
  const int trials = 10000;
  std::vector<double> errors(trials);
  EngineOptions options;
  options.master_seed = 93;
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    const QueryResult res =
        AnswerFedGroup(fed, q, PrivacyBudget(eps), options);
    CHECK(res.lambda_or_m == 2);
    errors[t] = res.answer - truth;
  }
  const double expected = 2.0 * 2 / (eps * eps);  // about 44.4
  const double var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);
}

TEST_CASE("fedgroup reduction cases") {
  Federation fed = SmallFederation(30, 72);
  const RangeQuery q{{0, 0}, 1.0};
  const double eps = 0.4;
  const double truth = AnswerPlaintext(fed, q).answer;
  const int trials = 5000;

  // All singletons: one noise instance per owner, the dp baseline shape.
  fed.grouping = UniformGrouping(30, 1);
  std::vector<double> errors(trials);
  EngineOptions options;
  options.master_seed = 94;
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    const QueryResult res =
        AnswerFedGroup(fed, q, PrivacyBudget(eps), options);
    CHECK(res.lambda_or_m == 30);
    const bool no_chain_rounds =
        !res.mpc_cost.has_value() || res.mpc_cost->rounds == 0;
    CHECK(no_chain_rounds);
    errors[t] = res.answer - truth;
  }
  double expected = 2.0 * 30 / (eps * eps);
  double var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);

  // One group: a single noise instance, the mpc baseline shape.
  fed.grouping = UniformGrouping(30, 30);
  options.master_seed = 95;
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    const QueryResult res =
        AnswerFedGroup(fed, q, PrivacyBudget(eps), options);
    CHECK(res.lambda_or_m == 1);
    errors[t] = res.answer - truth;
  }
  expected = 2.0 / (eps * eps);
  var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);
}

TEST_CASE("fedgroup requires a grouping") {
  Federation fed = SmallFederation(5, 1);
  CHECK_THROWS_AS(
      AnswerFedGroup(fed, {{0, 0}, 1.0}, PrivacyBudget(0.3), {}),
      std::invalid_argument);
}

TEST_CASE("variance ordering mpc < fedgroup < dp at 99% confidence") {
  Federation fed = SmallFederation(60, 73);
  fed.grouping = UniformGrouping(60, 10);  // lambda = 6
  const RangeQuery q{{0, 0}, 1.0};
  const double eps = 0.3;
  const double truth = AnswerPlaintext(fed, q).answer;
  const int trials = 10000;
  std::vector<double> dp_err(trials), mpc_err(trials), fg_err(trials);
  for (int t = 0; t < trials; ++t) {
    EngineOptions options;
    options.master_seed = 96;
    options.trial = t;
    dp_err[t] =
        AnswerDpBaseline(fed, q, PrivacyBudget(eps), options).answer - truth;
    mpc_err[t] =
        AnswerMpcBaseline(fed, q, PrivacyBudget(eps), options).answer - truth;
    fg_err[t] =
        AnswerFedGroup(fed, q, PrivacyBudget(eps), options).answer - truth;
  }
  const VarianceEstimate dp = ErrorVariance(dp_err);
  const VarianceEstimate mpc = ErrorVariance(mpc_err);
  const VarianceEstimate fg = ErrorVariance(fg_err);
  CHECK(mpc.var + mpc.half_width_99 < fg.var - fg.half_width_99);
  CHECK(fg.var + fg.half_width_99 < dp.var - dp.half_width_99);
}

TEST_CASE("noise instance accounting per engine") {
  Federation fed = SmallFederation(12, 74);
  fed.grouping = UniformGrouping(12, 4);
  const RangeQuery q{{0, 0}, 1.0};
  EngineOptions options;
  options.master_seed = 97;
  CHECK(AnswerPlaintext(fed, q, options).lambda_or_m == 0);
  CHECK(AnswerDpBaseline(fed, q, PrivacyBudget(0.3), options).lambda_or_m ==
        12);
  CHECK(AnswerMpcBaseline(fed, q, PrivacyBudget(0.3), options).lambda_or_m ==
        1);
  CHECK(AnswerFedGroup(fed, q, PrivacyBudget(0.3), options).lambda_or_m == 3);
}

TEST_CASE("private runs keep the release log clean, plaintext does not") {
  Federation fed = SmallFederation(10, 75);
  fed.grouping = UniformGrouping(10, 5);
  const RangeQuery q{{0, 0}, 1.0};
  ReleaseAudit audit;
  EngineOptions options;
  options.master_seed = 98;
  options.audit = &audit;
  AnswerDpBaseline(fed, q, PrivacyBudget(0.3), options);
  AnswerMpcBaseline(fed, q, PrivacyBudget(0.3), options);
  AnswerFedGroup(fed, q, PrivacyBudget(0.3), options);
  CHECK(audit.entries().size() > 0);
  CHECK(audit.ScanViolations().empty());
  // Budget accounting: dp charges every owner once, fedgroup once per
  // group, mpc once for the released answer.
  CHECK(audit.EpsilonConsumed() ==
        doctest::Approx((10 + 1 + 2) * 0.3).epsilon(1e-9));

  ReleaseAudit plain_audit;
  options.audit = &plain_audit;
  AnswerPlaintext(fed, q, options);
  CHECK(plain_audit.ScanViolations().size() == 10);
}

TEST_CASE("sum queries: truncation and dp variance") {
  Federation fed = SmallFederation(40, 76);
  const RangeQuery q{{0, 0}, 1.0};
  const double theta = 5.0;
  EngineOptions options;
  options.master_seed = 99;

  // Plain truth at huge epsilon and huge theta equals the untruncated sum.
  double plain = 0.0;
  for (const auto& silo : fed.silos) {
    plain += TruncatedPartialSum(silo, q, 1e9);
  }
  const QueryResult exact = AnswerSum(fed, q, EngineKind::kPlaintext,
                                      PrivacyBudget(1.0), 1e9, options);
  CHECK(exact.answer == doctest::Approx(plain).epsilon(1e-12));
  // Noise scale is theta/eps, so the budget must dwarf the truncation
  // bound for the noisy sum to collapse onto the plain one.
  const QueryResult huge_eps = AnswerSum(fed, q, EngineKind::kDp,
                                         PrivacyBudget(1e9), 1e3, options);
  CHECK(huge_eps.answer == doctest::Approx(plain).epsilon(1e-4));

  // DP-style variance 2 m theta^2 / eps^2.
  const double eps = 0.5;
  const int trials = 5000;
  const double truth = AnswerSum(fed, q, EngineKind::kPlaintext,
                                 PrivacyBudget(1.0), theta, options)
                           .answer;
  std::vector<double> errors(trials);
  for (int t = 0; t < trials; ++t) {
    options.trial = t;
    errors[t] = AnswerSum(fed, q, EngineKind::kDp, PrivacyBudget(eps), theta,
                          options)
                    .answer -
                truth;
  }
  const double expected = 2.0 * 40 * theta * theta / (eps * eps);
  const double var = testutil::Variance(errors);
  CHECK(var > expected * 0.9);
  CHECK(var < expected * 1.1);
}

TEST_CASE("sum saturates when every attribute exceeds theta") {
  Federation fed;
  std::vector<Location> records(4, Location{0, 0});
  fed.silos.emplace_back(1, records, std::vector<double>{9, 8, 7, 9});
  fed.grid = GridSpec{-1, -1, 1, 1, 2};
  const RangeQuery q{{0, 0}, 1.0};
  EngineOptions options;
  options.master_seed = 100;
  const QueryResult res = AnswerSum(fed, q, EngineKind::kDp,
                                    PrivacyBudget(1e8), 2.0, options);
  CHECK(res.answer == doctest::Approx(8.0).epsilon(1e-4));  // theta * count
  CHECK_THROWS_AS(AnswerSum(fed, q, EngineKind::kDp, PrivacyBudget(0.3),
                            0.0, options),
                  std::invalid_argument);
}

TEST_CASE("avg splits the budget and flags undefined division") {
  Federation fed = SmallFederation(30, 77);
  const RangeQuery q{{0, 0}, 1.0};
  EngineOptions options;
  options.master_seed = 101;

  const QueryResult plain = AnswerAvg(fed, q, EngineKind::kPlaintext,
                                      PrivacyBudget(1.0), 100.0, options);
  const QueryResult high = AnswerAvg(fed, q, EngineKind::kDp,
                                     PrivacyBudget(1e8), 100.0, options);
  CHECK(plain.defined);
  CHECK(high.defined);
  CHECK(high.answer == doctest::Approx(plain.answer).epsilon(1e-4));
  CHECK(high.epsilon_query == 1e8);

  // An empty range with a tiny budget makes the noisy count non-positive
  // roughly half the time; scan trials for a flagged case.
  const RangeQuery far{{100, 100}, 0.001};
  Federation tiny = SmallFederation(2, 78);
  bool saw_undefined = false;
  for (int t = 0; t < 50 && !saw_undefined; ++t) {
    options.trial = t;
    const QueryResult res = AnswerAvg(tiny, far, EngineKind::kDp,
                                      PrivacyBudget(0.1), 10.0, options);
    if (!res.defined) {
      CHECK(std::isnan(res.answer));
      saw_undefined = true;
    }
  }
  CHECK(saw_undefined);
}

TEST_CASE("federation validation") {
  Federation fed = SmallFederation(3, 79);
  fed.silos.erase(fed.silos.begin());  // ids now 2, 3
  CHECK_THROWS_AS(ValidateFederation(fed), std::invalid_argument);

  Federation ok = SmallFederation(3, 79);
  ok.grouping = UniformGrouping(5, 2);  // wrong owner count
  CHECK_THROWS_AS(ValidateFederation(ok), std::invalid_argument);
}
