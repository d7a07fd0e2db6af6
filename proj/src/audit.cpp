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

#include "fedspatial/audit.hpp"

namespace fedspatial {

namespace {

constexpr int kMaxStoredViolations = 200;

// Empty when admissible, otherwise a description of the breach.
std::string ViolationOf(const ReleaseEntry& e) {
  switch (e.kind) {
    case ReleaseKind::kNoisyScalar:
    case ReleaseKind::kNoisyVector:
      if (!(e.epsilon > 0.0)) {
        return "owner " + std::to_string(e.owner) +
               " released a noisy value without a budget tag";
      }
      return {};
    case ReleaseKind::kSecretShare:
      if (e.session < 0) {
        return "owner " + std::to_string(e.owner) +
               " released a secret share outside a session";
      }
      return {};
    case ReleaseKind::kExactScalar:
    case ReleaseKind::kExactVector:
    case ReleaseKind::kRawRecord:
      return "owner " + std::to_string(e.owner) + " released " +
             ReleaseKindName(e.kind) + " outside an mpc session";
  }
  return "unknown release kind";
}

}  // namespace

const char* ReleaseKindName(ReleaseKind kind) {
  switch (kind) {
    case ReleaseKind::kNoisyScalar: return "noisy-scalar";
    case ReleaseKind::kNoisyVector: return "noisy-vector";
    case ReleaseKind::kSecretShare: return "secret-share";
    case ReleaseKind::kExactScalar: return "exact-scalar";
    case ReleaseKind::kExactVector: return "exact-vector";
    case ReleaseKind::kRawRecord: return "raw-record";
  }
  return "unknown";
}

void ReleaseAudit::Record(int owner, ReleaseKind kind, double epsilon,
                          int64_t session) {
  const ReleaseEntry entry{owner, kind, epsilon, session};
  total_entries_ += 1;
  if (kind == ReleaseKind::kNoisyScalar || kind == ReleaseKind::kNoisyVector) {
    total_epsilon_ += epsilon;
    epsilon_by_owner_[owner] += epsilon;
  }
  const std::string violation = ViolationOf(entry);
  if (!violation.empty()) {
    violation_count_ += 1;
    if (static_cast<int>(violations_.size()) < kMaxStoredViolations) {
      violations_.push_back(violation);
    }
  }
  if (keep_full_log_) entries_.push_back(entry);
}

double ReleaseAudit::EpsilonConsumed(int owner) const {
  if (owner == 0) return total_epsilon_;
  const auto it = epsilon_by_owner_.find(owner);
  return it == epsilon_by_owner_.end() ? 0.0 : it->second;
}

void ReleaseAudit::Clear() {
  entries_.clear();
  violations_.clear();
  violation_count_ = 0;
  total_entries_ = 0;
  total_epsilon_ = 0.0;
  epsilon_by_owner_.clear();
}

}  // namespace fedspatial
