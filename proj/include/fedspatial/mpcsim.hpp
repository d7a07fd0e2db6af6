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

#ifndef FEDSPATIAL_MPCSIM_HPP_
#define FEDSPATIAL_MPCSIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedspatial/audit.hpp"
#include "fedspatial/rng.hpp"
#include "fedspatial/silo.hpp"

namespace fedspatial {

// Functional simulation of secure multiparty computation: additive secret
// sharing over Z_2^64 with a trusted dealer for masks and multiplication
// triples, plus full round/byte accounting. Results are exact and costs are
// deterministic, but this is NOT cryptographically secure; it reproduces
// protocol outputs and communication shape, not security guarantees.

// Two's complement fixed-point encoding into the 2^64 ring.
struct FixedPoint {
  int scale_bits = 20;

  uint64_t Encode(double x) const;
  double Decode(uint64_t raw) const;
};

struct MpcCost {
  int64_t rounds = 0;
  int64_t bytes = 0;
  double simulated_latency_ms = 0.0;
};

// One secure computation session: an in-process message fabric between a
// fixed set of parties and the dealer. Distinct sessions (e.g. distinct
// owner pairs) are independent; a session is single-threaded.
class MpcSession {
 public:
  // dealer_seed drives all dealer and party-local randomness. session_id
  // tags audit entries for share submissions. Transcript recording is off
  // by default; tests that inspect received payloads turn it on.
  explicit MpcSession(uint64_t dealer_seed, double round_latency_ms = 1.0,
                      int64_t session_id = 0, ReleaseAudit* audit = nullptr,
                      bool record_transcripts = false);

  MpcCost Cost() const { return cost_; }
  int64_t session_id() const { return session_id_; }
  const std::vector<uint64_t>& Transcript(int party) const;

  // Fabric internals, used by the protocol implementations.
  void Send(int from, int to, std::span<const uint64_t> words);
  void DealerSend(int to, std::span<const uint64_t> words);
  void AdvanceRound();
  RngStream& dealer_rng() { return dealer_rng_; }
  RngStream& party_rng(int party);
  ReleaseAudit* audit() { return audit_; }

 private:
  void EnsureParty(int party);

  RngStream dealer_rng_;
  std::vector<RngStream> party_rngs_;
  std::vector<std::vector<uint64_t>> transcripts_;
  MpcCost cost_;
  double round_latency_ms_;
  int64_t session_id_;
  ReleaseAudit* audit_;
  bool record_transcripts_;
};

// Exact sum of per-party integer inputs over a sequential chain: party i
// forwards the masked running total to party i+1, dealer masks cancel at
// the end. Rounds = parties - 1. Throws on fewer than 2 parties or when
// the true sum magnitude reaches 2^63.
int64_t SecureSum(MpcSession& session, std::span<const int64_t> inputs,
                  std::span<const int> owner_ids = {});

// Cosine of two exact count vectors computed over secret shares: inputs are
// fixed-point encoded and shared, the dot product and both squared norms go
// through dealer-supplied multiplication triples, and only the three
// aggregates are revealed for the clear-side division and square root.
// Exact for integer vectors up to the ring guard; zero-norm inputs give 0.
double SecureCosine(MpcSession& session, const CountVector& a,
                    const CountVector& b, int owner_a = 0, int owner_b = 0,
                    int scale_bits = 20);

// Session cost totals (zeros for a fresh session).
MpcCost CostReport(const MpcSession& session);

}  // namespace fedspatial

#endif  // FEDSPATIAL_MPCSIM_HPP_
