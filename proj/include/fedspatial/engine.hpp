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

#ifndef FEDSPATIAL_ENGINE_HPP_
#define FEDSPATIAL_ENGINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "fedspatial/grouping.hpp"
#include "fedspatial/mpcsim.hpp"
#include "fedspatial/silo.hpp"

namespace fedspatial {

enum class EngineKind { kPlaintext, kDp, kMpc, kFedGroup };

EngineKind ParseEngineKind(const std::string& name);
const char* EngineKindName(EngineKind kind);

// The queryable federation: silos with owner ids 1..m, the shared grid, and
// an optional grouping (required by the fedgroup engine).
struct Federation {
  std::vector<SpatialSilo> silos;
  GridSpec grid;
  std::optional<Grouping> grouping;

  int owner_count() const { return static_cast<int>(silos.size()); }
};

void ValidateFederation(const Federation& fed);

// One answered query with full accounting. true_answer is computed by the
// non-private reference scan for metrics only; it never travels through the
// audited release path. wall_ms is measured wall time; simulated_ms is the
// deterministic protocol time (mpc rounds x configured per-round latency)
// and is what benchmark CSVs report.
struct QueryResult {
  double answer = 0.0;
  double true_answer = 0.0;
  EngineKind engine = EngineKind::kPlaintext;
  double epsilon_query = 0.0;
  int64_t lambda_or_m = 0;  // noise instances: m for dp, 1 for mpc, lambda
                            // for fedgroup, 0 for plaintext
  std::optional<MpcCost> mpc_cost;
  double wall_ms = 0.0;
  double simulated_ms = 0.0;
  bool defined = true;
};

struct EngineOptions {
  uint64_t master_seed = 0;
  uint64_t trial = 0;  // repeated trials of one query use distinct trials
  double round_latency_ms = 1.0;
  ReleaseAudit* audit = nullptr;
};

// Exact federated count. Non-private reference: when an audit is attached,
// the exact partial counts it releases are logged and will be flagged.
QueryResult AnswerPlaintext(const Federation& fed, const RangeQuery& q,
                            const EngineOptions& options = {});

// One Lap(1/eps) per silo, summed. Var = 2m/eps^2.
QueryResult AnswerDpBaseline(const Federation& fed, const RangeQuery& q,
                             PrivacyBudget budget,
                             const EngineOptions& options = {});

// Secure chain sum over all partial counts plus exactly one Lap(1/eps).
// Var = 2/eps^2.
QueryResult AnswerMpcBaseline(const Federation& fed, const RangeQuery& q,
                              PrivacyBudget budget,
                              const EngineOptions& options = {});

// Per group: secure intra-group sum (members' raw partials never reach the
// coordinator) plus one Lap(1/eps); the coordinator adds the lambda noisy
// group answers. Var = 2*lambda/eps^2.
QueryResult AnswerFedGroup(const Federation& fed, const RangeQuery& q,
                           PrivacyBudget budget,
                           const EngineOptions& options = {});

// Dispatch by engine kind (budget ignored for plaintext).
QueryResult AnswerCount(const Federation& fed, const RangeQuery& q,
                        EngineKind engine, PrivacyBudget budget,
                        const EngineOptions& options = {});

// SUM over the per-record attribute truncated at theta; mirrors the count
// engines with per-record sensitivity theta (noise scale theta/eps).
QueryResult AnswerSum(const Federation& fed, const RangeQuery& q,
                      EngineKind engine, PrivacyBudget budget, double theta,
                      const EngineOptions& options = {});

// AVG = noisy SUM / noisy COUNT with an even budget split. A noisy count
// <= 0 flags the result undefined.
QueryResult AnswerAvg(const Federation& fed, const RangeQuery& q,
                      EngineKind engine, PrivacyBudget budget, double theta,
                      const EngineOptions& options = {});

}  // namespace fedspatial

#endif  // FEDSPATIAL_ENGINE_HPP_
