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

#include "fedspatial/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedspatial {

namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

double TrueCount(const Federation& fed, const RangeQuery& q) {
  int64_t total = 0;
  for (const SpatialSilo& silo : fed.silos) {
    total += CountInRange(silo.records(), q);
  }
  return static_cast<double>(total);
}

double TrueTruncatedSum(const Federation& fed, const RangeQuery& q,
                        double theta) {
  double total = 0.0;
  for (const SpatialSilo& silo : fed.silos) {
    total += TruncatedPartialSum(silo, q, theta);
  }
  return total;
}

void AccumulateCost(MpcCost& total, const MpcCost& part) {
  total.rounds += part.rounds;
  total.bytes += part.bytes;
  total.simulated_latency_ms += part.simulated_latency_ms;
}

int64_t GroupSessionId(uint64_t trial, int gid) {
  return static_cast<int64_t>((trial << 20) + static_cast<uint64_t>(gid));
}

// Shared shape of the dp / mpc / fedgroup mechanisms over arbitrary
// per-silo real-valued partials with a given noise scale. Count and SUM
// engines differ only in the partial function and the scale, so both
// funnel through here. noise_tag keeps AVG's two halves on disjoint
// streams.
template <typename PartialFn>
QueryResult RunMechanism(const Federation& fed, EngineKind engine,
                         PrivacyBudget budget, double noise_scale,
                         double true_answer, PartialFn partial,
                         const EngineOptions& options,
                         std::string_view noise_tag) {
  const auto start = Clock::now();
  const int m = fed.owner_count();
  QueryResult result;
  result.engine = engine;
  result.true_answer = true_answer;
  result.epsilon_query = budget.epsilon;

  const FixedPoint fp{20};
  ReleaseAudit* audit = options.audit;

  switch (engine) {
    case EngineKind::kPlaintext: {
      double total = 0.0;
      for (const SpatialSilo& silo : fed.silos) {
        total += partial(silo);
        if (audit != nullptr) {
          audit->Record(silo.owner_id(), ReleaseKind::kExactScalar);
        }
      }
      result.answer = total;
      result.lambda_or_m = 0;
      break;
    }
    case EngineKind::kDp: {
      double total = 0.0;
      for (const SpatialSilo& silo : fed.silos) {
        RngStream rng = DeriveStream(options.master_seed, noise_tag,
                                     options.trial, silo.owner_id());
        total += partial(silo) + rng.NextLaplace(noise_scale);
        if (audit != nullptr) {
          audit->Record(silo.owner_id(), ReleaseKind::kNoisyScalar,
                        budget.epsilon);
        }
      }
      result.answer = total;
      result.lambda_or_m = m;
      break;
    }
    case EngineKind::kMpc: {
      MpcCost cost;
      double total = 0.0;
      if (m == 1) {
        // A chain needs a counterpart; a lone owner holds the sum itself.
        total = partial(fed.silos.front());
      } else {
        std::vector<int64_t> shares;
        std::vector<int> owners;
        shares.reserve(m);
        owners.reserve(m);
        for (const SpatialSilo& silo : fed.silos) {
          shares.push_back(
              static_cast<int64_t>(fp.Encode(partial(silo))));
          owners.push_back(silo.owner_id());
        }
        MpcSession session(
            DeriveStream(options.master_seed, "mpc-query", options.trial)
                .NextU64(),
            options.round_latency_ms,
            static_cast<int64_t>(options.trial), audit);
        const int64_t ring_sum = SecureSum(session, shares, owners);
        total = fp.Decode(static_cast<uint64_t>(ring_sum));
        cost = session.Cost();
      }
      RngStream rng =
          DeriveStream(options.master_seed, noise_tag, options.trial, 0);
      result.answer = total + rng.NextLaplace(noise_scale);
      if (audit != nullptr) {
        audit->Record(fed.silos.back().owner_id(), ReleaseKind::kNoisyScalar,
                      budget.epsilon);
      }
      result.lambda_or_m = 1;
      result.mpc_cost = cost;
      result.simulated_ms = cost.simulated_latency_ms;
      break;
    }
    case EngineKind::kFedGroup: {
      if (!fed.grouping.has_value()) {
        throw std::invalid_argument("fedgroup engine requires a grouping");
      }
      const Grouping& grouping = *fed.grouping;
      const auto members = GroupMembers(grouping);
      MpcCost cost;
      double total = 0.0;
      for (int gid = 1; gid <= grouping.lambda; ++gid) {
        const std::vector<int>& group = members[gid];
        double group_sum = 0.0;
        if (group.size() == 1) {
          group_sum = partial(fed.silos[group[0] - 1]);
        } else {
          std::vector<int64_t> shares;
          shares.reserve(group.size());
          for (int u : group) {
            shares.push_back(
                static_cast<int64_t>(fp.Encode(partial(fed.silos[u - 1]))));
          }
          MpcSession session(
              DeriveStream(options.master_seed, "mpc-group", options.trial,
                           static_cast<uint64_t>(gid))
                  .NextU64(),
              options.round_latency_ms, GroupSessionId(options.trial, gid),
              audit);
          const int64_t ring_sum =
              SecureSum(session, shares, std::span<const int>(group));
          group_sum = fp.Decode(static_cast<uint64_t>(ring_sum));
          AccumulateCost(cost, session.Cost());
        }
        RngStream rng = DeriveStream(options.master_seed, noise_tag,
                                     options.trial,
                                     0x8000000000000000ULL |
                                         static_cast<uint64_t>(gid));
        total += group_sum + rng.NextLaplace(noise_scale);
        if (audit != nullptr) {
          // The lowest-id member holds the group answer and releases it.
          audit->Record(group.front(), ReleaseKind::kNoisyScalar,
                        budget.epsilon);
        }
      }
      result.answer = total;
      result.lambda_or_m = grouping.lambda;
      result.mpc_cost = cost;
      result.simulated_ms = cost.simulated_latency_ms;
      break;
    }
  }
  result.wall_ms = ElapsedMs(start);
  return result;
}

}  // namespace

EngineKind ParseEngineKind(const std::string& name) {
  if (name == "plaintext") return EngineKind::kPlaintext;
  if (name == "dp") return EngineKind::kDp;
  if (name == "mpc") return EngineKind::kMpc;
  if (name == "fedgroup") return EngineKind::kFedGroup;
  throw std::invalid_argument("unknown engine: " + name);
}

const char* EngineKindName(EngineKind kind) {
  switch (kind) {
    case EngineKind::kPlaintext: return "plaintext";
    case EngineKind::kDp: return "dp";
    case EngineKind::kMpc: return "mpc";
    case EngineKind::kFedGroup: return "fedgroup";
  }
  return "unknown";
}

void ValidateFederation(const Federation& fed) {
  const int m = fed.owner_count();
  for (int i = 0; i < m; ++i) {
    if (fed.silos[i].owner_id() != i + 1) {
      throw std::invalid_argument("owner ids must be 1..m in order");
    }
  }
  ValidateGrid(fed.grid);
  if (fed.grouping.has_value() && fed.grouping->owner_count() != m) {
    throw std::invalid_argument("grouping must cover exactly the owners");
  }
}

QueryResult AnswerPlaintext(const Federation& fed, const RangeQuery& q,
                            const EngineOptions& options) {
  ValidateQuery(q);
  const double truth = TrueCount(fed, q);
  // Budget value is irrelevant for the plaintext path; noise is never drawn.
  QueryResult result = RunMechanism(
      fed, EngineKind::kPlaintext, PrivacyBudget(1.0), 1.0, truth,
      [&q](const SpatialSilo& s) {
        return static_cast<double>(PartialCount(s, q));
      },
      options, "query-noise");
  result.epsilon_query = 0.0;
  return result;
}

QueryResult AnswerDpBaseline(const Federation& fed, const RangeQuery& q,
                             PrivacyBudget budget,
                             const EngineOptions& options) {
  ValidateQuery(q);
  return RunMechanism(
      fed, EngineKind::kDp, budget, 1.0 / budget.epsilon, TrueCount(fed, q),
      [&q](const SpatialSilo& s) {
        return static_cast<double>(PartialCount(s, q));
      },
      options, "query-noise");
}

QueryResult AnswerMpcBaseline(const Federation& fed, const RangeQuery& q,
                              PrivacyBudget budget,
                              const EngineOptions& options) {
  ValidateQuery(q);
  return RunMechanism(
      fed, EngineKind::kMpc, budget, 1.0 / budget.epsilon, TrueCount(fed, q),
      [&q](const SpatialSilo& s) {
        return static_cast<double>(PartialCount(s, q));
      },
      options, "query-noise");
}

QueryResult AnswerFedGroup(const Federation& fed, const RangeQuery& q,
                           PrivacyBudget budget,
                           const EngineOptions& options) {
  ValidateQuery(q);
  return RunMechanism(
      fed, EngineKind::kFedGroup, budget, 1.0 / budget.epsilon,
      TrueCount(fed, q),
      [&q](const SpatialSilo& s) {
        return static_cast<double>(PartialCount(s, q));
      },
      options, "query-noise");
}

QueryResult AnswerCount(const Federation& fed, const RangeQuery& q,
                        EngineKind engine, PrivacyBudget budget,
                        const EngineOptions& options) {
  switch (engine) {
    case EngineKind::kPlaintext: return AnswerPlaintext(fed, q, options);
    case EngineKind::kDp: return AnswerDpBaseline(fed, q, budget, options);
    case EngineKind::kMpc: return AnswerMpcBaseline(fed, q, budget, options);
    case EngineKind::kFedGroup: return AnswerFedGroup(fed, q, budget, options);
  }
  throw std::invalid_argument("unknown engine kind");
}

QueryResult AnswerSum(const Federation& fed, const RangeQuery& q,
                      EngineKind engine, PrivacyBudget budget, double theta,
                      const EngineOptions& options) {
  ValidateQuery(q);
  if (!(theta > 0.0)) {
    throw std::invalid_argument("truncation parameter theta must be > 0");
  }
  return RunMechanism(
      fed, engine, budget, theta / budget.epsilon,
      TrueTruncatedSum(fed, q, theta),
      [&q, theta](const SpatialSilo& s) {
        return TruncatedPartialSum(s, q, theta);
      },
      options, "sum-noise");
}

QueryResult AnswerAvg(const Federation& fed, const RangeQuery& q,
                      EngineKind engine, PrivacyBudget budget, double theta,
                      const EngineOptions& options) {
  ValidateQuery(q);
  if (!(theta > 0.0)) {
    throw std::invalid_argument("truncation parameter theta must be > 0");
  }
  const PrivacyBudget half(budget.epsilon / 2.0);
  QueryResult sum_result = RunMechanism(
      fed, engine, half, theta / half.epsilon, TrueTruncatedSum(fed, q, theta),
      [&q, theta](const SpatialSilo& s) {
        return TruncatedPartialSum(s, q, theta);
      },
      options, "avg-sum-noise");
  QueryResult count_result = RunMechanism(
      fed, engine, half, 1.0 / half.epsilon, TrueCount(fed, q),
      [&q](const SpatialSilo& s) {
        return static_cast<double>(PartialCount(s, q));
      },
      options, "avg-count-noise");

  QueryResult result = sum_result;
  result.epsilon_query = budget.epsilon;
  result.true_answer = count_result.true_answer > 0.0
                           ? sum_result.true_answer / count_result.true_answer
                           : std::numeric_limits<double>::quiet_NaN();
  if (engine == EngineKind::kPlaintext) {
    result.answer = result.true_answer;
    result.defined = count_result.true_answer > 0.0;
  } else if (count_result.answer > 0.0) {
    result.answer = sum_result.answer / count_result.answer;
    result.defined = true;
  } else {
    result.answer = std::numeric_limits<double>::quiet_NaN();
    result.defined = false;
  }
  if (sum_result.mpc_cost.has_value()) {
    MpcCost cost = *sum_result.mpc_cost;
    AccumulateCost(cost, count_result.mpc_cost.value_or(MpcCost{}));
    result.mpc_cost = cost;
    result.simulated_ms = cost.simulated_latency_ms;
  }
  result.wall_ms = sum_result.wall_ms + count_result.wall_ms;
  return result;
}

}  // namespace fedspatial
