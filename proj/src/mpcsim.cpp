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

#include "fedspatial/mpcsim.hpp"

#include <cmath>
#include <stdexcept>

namespace fedspatial {

namespace {

constexpr int64_t kEncodedGuard = int64_t{1} << 43;

uint64_t ToRing(int64_t x) { return static_cast<uint64_t>(x); }
int64_t FromRing(uint64_t x) { return static_cast<int64_t>(x); }

}  // namespace

uint64_t FixedPoint::Encode(double x) const {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("fixed-point input must be finite");
  }
  const double scaled = x * static_cast<double>(int64_t{1} << scale_bits);
  if (!(std::abs(scaled) < static_cast<double>(kEncodedGuard))) {
    throw std::overflow_error("fixed-point overflow: |x * 2^s| >= 2^43");
  }
  return ToRing(std::llround(scaled));
}

double FixedPoint::Decode(uint64_t raw) const {
  return static_cast<double>(FromRing(raw)) /
         static_cast<double>(int64_t{1} << scale_bits);
}

MpcSession::MpcSession(uint64_t dealer_seed, double round_latency_ms,
                       int64_t session_id, ReleaseAudit* audit,
                       bool record_transcripts)
    : dealer_rng_(DeriveStream(dealer_seed, "mpc-dealer")),
      round_latency_ms_(round_latency_ms),
      session_id_(session_id),
      audit_(audit),
      record_transcripts_(record_transcripts) {
  if (session_id < 0) throw std::invalid_argument("session id must be >= 0");
  // Party-local randomness is derived from the same session seed under a
  // different role tag, so a session replays identically for a fixed seed.
  for (int p = 0; p < 2; ++p) {
    party_rngs_.push_back(DeriveStream(dealer_seed, "mpc-party", p));
  }
}

void MpcSession::EnsureParty(int party) {
  if (party < 0) throw std::invalid_argument("party index must be >= 0");
  while (static_cast<int>(party_rngs_.size()) <= party) {
    party_rngs_.push_back(DeriveStream(dealer_rng_.NextU64(), "mpc-party",
                                       party_rngs_.size()));
  }
  if (record_transcripts_ &&
      static_cast<int>(transcripts_.size()) <= party) {
    transcripts_.resize(party + 1);
  }
}

RngStream& MpcSession::party_rng(int party) {
  EnsureParty(party);
  return party_rngs_[party];
}

const std::vector<uint64_t>& MpcSession::Transcript(int party) const {
  static const std::vector<uint64_t> kEmpty;
  if (party < 0 || party >= static_cast<int>(transcripts_.size())) {
    return kEmpty;
  }
  return transcripts_[party];
}

void MpcSession::Send(int from, int to, std::span<const uint64_t> words) {
  if (from == to) throw std::invalid_argument("party cannot message itself");
  EnsureParty(from);
  EnsureParty(to);
  cost_.bytes += static_cast<int64_t>(words.size()) * 8;
  if (record_transcripts_) {
    auto& t = transcripts_[to];
    t.insert(t.end(), words.begin(), words.end());
  }
}

void MpcSession::DealerSend(int to, std::span<const uint64_t> words) {
  EnsureParty(to);
  cost_.bytes += static_cast<int64_t>(words.size()) * 8;
  if (record_transcripts_) {
    auto& t = transcripts_[to];
    t.insert(t.end(), words.begin(), words.end());
  }
}

void MpcSession::AdvanceRound() {
  cost_.rounds += 1;
  cost_.simulated_latency_ms += round_latency_ms_;
}

int64_t SecureSum(MpcSession& session, std::span<const int64_t> inputs,
                  std::span<const int> owner_ids) {
  const size_t p = inputs.size();
  if (p < 2) {
    throw std::invalid_argument("secure sum needs at least 2 parties");
  }
  if (!owner_ids.empty() && owner_ids.size() != p) {
    throw std::invalid_argument("one owner id per party required");
  }

  // Simulation-level overflow guard: the ring result is exact only while
  // the true sum stays below 2^63 in magnitude.
  __int128 true_sum = 0;
  for (int64_t x : inputs) true_sum += x;
  if (true_sum >= (__int128{1} << 63) || true_sum <= -(__int128{1} << 63)) {
    throw std::overflow_error("secure sum overflow beyond 2^63");
  }

  // Dealer masks summing to zero mod 2^64; one per party.
  std::vector<uint64_t> masks(p);
  uint64_t mask_total = 0;
  for (size_t i = 0; i + 1 < p; ++i) {
    masks[i] = session.dealer_rng().NextU64();
    mask_total += masks[i];
  }
  masks[p - 1] = ~mask_total + 1;
  for (size_t i = 0; i < p; ++i) {
    session.DealerSend(static_cast<int>(i), std::span(&masks[i], 1));
  }

  if (session.audit() != nullptr) {
    for (size_t i = 0; i < p; ++i) {
      const int owner =
          owner_ids.empty() ? static_cast<int>(i) + 1 : owner_ids[i];
      session.audit()->Record(owner, ReleaseKind::kSecretShare, 0.0,
                              session.session_id());
    }
  }

  // Sequential chain: each party adds its masked input to the running total
  // and forwards it; every forwarded value is uniform under the masks.
  uint64_t acc = 0;
  for (size_t i = 0; i < p; ++i) {
    acc += ToRing(inputs[i]) + masks[i];
    if (i + 1 < p) {
      session.Send(static_cast<int>(i), static_cast<int>(i + 1),
                   std::span(&acc, 1));
      session.AdvanceRound();
    }
  }
  return FromRing(acc);
}

double SecureCosine(MpcSession& session, const CountVector& a,
                    const CountVector& b, int owner_a, int owner_b,
                    int scale_bits) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("cosine inputs must have equal length");
  }
  if (a.kind != VectorKind::kExact || b.kind != VectorKind::kExact) {
    throw std::invalid_argument("secure cosine expects exact count vectors");
  }
  const size_t len = a.values.size();
  const FixedPoint fp{scale_bits};

  // Products live at scale 2s; guard the true aggregates against the ring.
  {
    __int128 dot = 0, na2 = 0, nb2 = 0;
    const __int128 lim = __int128{1} << (63 - 2 * scale_bits);
    for (size_t t = 0; t < len; ++t) {
      const auto av = static_cast<__int128>(std::llround(a.values[t]));
      const auto bv = static_cast<__int128>(std::llround(b.values[t]));
      dot += av * bv;
      na2 += av * av;
      nb2 += bv * bv;
    }
    if (dot >= lim || na2 >= lim || nb2 >= lim) {
      throw std::overflow_error("secure cosine aggregate exceeds the ring");
    }
  }

  if (session.audit() != nullptr) {
    session.audit()->Record(owner_a == 0 ? 1 : owner_a,
                            ReleaseKind::kSecretShare, 0.0,
                            session.session_id());
    session.audit()->Record(owner_b == 0 ? 2 : owner_b,
                            ReleaseKind::kSecretShare, 0.0,
                            session.session_id());
  }

  // Phase 1: each party additively shares its encoded vector with the other.
  std::vector<uint64_t> a0(len), a1(len), b0(len), b1(len);
  for (size_t t = 0; t < len; ++t) {
    const uint64_t ea = fp.Encode(a.values[t]);
    const uint64_t eb = fp.Encode(b.values[t]);
    a1[t] = session.party_rng(0).NextU64();
    a0[t] = ea - a1[t];
    b0[t] = session.party_rng(1).NextU64();
    b1[t] = eb - b0[t];
  }
  session.Send(0, 1, a1);
  session.Send(1, 0, b0);
  session.AdvanceRound();

  // Phase 2: 3L Beaver products (a*b, a*a, b*b per entry). Triples come
  // from the dealer; the masked differences d = x - ta and e = y - tb are
  // opened in one batched round.
  uint64_t agg0[3] = {0, 0, 0};  // party 0 shares of dot, |a|^2, |b|^2
  uint64_t agg1[3] = {0, 0, 0};
  std::vector<uint64_t> dealer0, dealer1, open0, open1;
  dealer0.reserve(9 * len);
  dealer1.reserve(9 * len);
  open0.reserve(6 * len);
  open1.reserve(6 * len);
  for (size_t t = 0; t < len; ++t) {
    const uint64_t xs0[3] = {a0[t], a0[t], b0[t]};
    const uint64_t xs1[3] = {a1[t], a1[t], b1[t]};
    const uint64_t ys0[3] = {b0[t], a0[t], b0[t]};
    const uint64_t ys1[3] = {b1[t], a1[t], b1[t]};
    for (int k = 0; k < 3; ++k) {
      const uint64_t ta = session.dealer_rng().NextU64();
      const uint64_t tb = session.dealer_rng().NextU64();
      const uint64_t tc = ta * tb;
      const uint64_t ta0 = session.dealer_rng().NextU64();
      const uint64_t tb0 = session.dealer_rng().NextU64();
      const uint64_t tc0 = session.dealer_rng().NextU64();
      const uint64_t ta1 = ta - ta0, tb1 = tb - tb0, tc1 = tc - tc0;
      dealer0.insert(dealer0.end(), {ta0, tb0, tc0});
      dealer1.insert(dealer1.end(), {ta1, tb1, tc1});

      const uint64_t d0 = xs0[k] - ta0, d1 = xs1[k] - ta1;
      const uint64_t e0 = ys0[k] - tb0, e1 = ys1[k] - tb1;
      open0.insert(open0.end(), {d0, e0});
      open1.insert(open1.end(), {d1, e1});
      const uint64_t d = d0 + d1, e = e0 + e1;
      const uint64_t z0 = tc0 + d * tb0 + e * ta0 + d * e;
      const uint64_t z1 = tc1 + d * tb1 + e * ta1;
      agg0[k] += z0;
      agg1[k] += z1;
    }
  }
  session.DealerSend(0, dealer0);
  session.DealerSend(1, dealer1);
  session.Send(0, 1, open0);
  session.Send(1, 0, open1);
  session.AdvanceRound();

  // Phase 3: reveal the three aggregates only.
  session.Send(0, 1, std::span<const uint64_t>(agg0, 3));
  session.Send(1, 0, std::span<const uint64_t>(agg1, 3));
  session.AdvanceRound();

  const double scale = static_cast<double>(int64_t{1} << (2 * scale_bits));
  const double dot = static_cast<double>(FromRing(agg0[0] + agg1[0])) / scale;
  const double na2 = static_cast<double>(FromRing(agg0[1] + agg1[1])) / scale;
  const double nb2 = static_cast<double>(FromRing(agg0[2] + agg1[2])) / scale;
  if (!(na2 > 0.0) || !(nb2 > 0.0)) return 0.0;
  const double cosine = dot / std::sqrt(na2 * nb2);
  return std::min(1.0, std::max(-1.0, cosine));
}

MpcCost CostReport(const MpcSession& session) { return session.Cost(); }

}  // namespace fedspatial
