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

#ifndef FEDSPATIAL_AUDIT_HPP_
#define FEDSPATIAL_AUDIT_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace fedspatial {

// What kind of value crossed a silo boundary. Only DP-protected values and
// secret shares inside an MPC session are admissible in a private run;
// everything else is a release-boundary violation. Exact kinds exist so the
// non-private reference paths can be audited too (and flagged).
enum class ReleaseKind {
  kNoisyScalar,
  kNoisyVector,
  kSecretShare,
  kExactScalar,
  kExactVector,
  kRawRecord,
};

const char* ReleaseKindName(ReleaseKind kind);

struct ReleaseEntry {
  int owner = 0;
  ReleaseKind kind = ReleaseKind::kNoisyScalar;
  double epsilon = 0.0;   // budget attached to a DP release, 0 otherwise
  int64_t session = -1;   // mpc session id for kSecretShare, -1 otherwise
};

// Log of every value that crosses a silo boundary during a run. One audit
// object scopes one run; a clean scan is the testable form of the privacy
// requirements: only DP-protected values and in-session secret shares were
// released. Every release is checked as it is recorded; by default the full
// entry list is retained, while streaming mode keeps only counters, budget
// tallies, and the violations themselves (for runs with millions of
// releases).
class ReleaseAudit {
 public:
  explicit ReleaseAudit(bool keep_full_log = true)
      : keep_full_log_(keep_full_log) {}

  void Record(int owner, ReleaseKind kind, double epsilon = 0.0,
              int64_t session = -1);

  // Retained entries; empty in streaming mode.
  const std::vector<ReleaseEntry>& entries() const { return entries_; }
  int64_t total_entries() const { return total_entries_; }

  // Every violating release seen so far (descriptions capped; the count is
  // exact).
  std::vector<std::string> ScanViolations() const { return violations_; }
  int64_t violation_count() const { return violation_count_; }

  // Sum of epsilon over all DP releases by the given owner (or all owners
  // when owner == 0). Reported, not enforced.
  double EpsilonConsumed(int owner = 0) const;

  void Clear();

 private:
  bool keep_full_log_;
  std::vector<ReleaseEntry> entries_;
  std::vector<std::string> violations_;
  int64_t violation_count_ = 0;
  int64_t total_entries_ = 0;
  double total_epsilon_ = 0.0;
  std::unordered_map<int, double> epsilon_by_owner_;
};

}  // namespace fedspatial

#endif  // FEDSPATIAL_AUDIT_HPP_
