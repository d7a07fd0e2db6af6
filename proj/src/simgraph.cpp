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

#include "fedspatial/simgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fedspatial {

SimilarityGraph::SimilarityGraph(int node_count) : node_count_(node_count) {
  if (node_count < 0) {
    throw std::invalid_argument("node count must be non-negative");
  }
  adj_.resize(node_count + 1);
}

void SimilarityGraph::AddEdge(int i, int j, double weight) {
  if (i == j) throw std::invalid_argument("self-loops are not allowed");
  if (i < 1 || i > node_count_ || j < 1 || j > node_count_) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  if (!(weight >= -1.0 && weight <= 1.0)) {
    throw std::invalid_argument("edge weight must lie in [-1, 1]");
  }
  if (i > j) std::swap(i, j);
  auto& list = adj_[i];
  auto pos = std::lower_bound(
      list.begin(), list.end(), j,
      [](const std::pair<int, double>& p, int v) { return p.first < v; });
  if (pos != list.end() && pos->first == j) {
    throw std::invalid_argument("duplicate edge");
  }
  list.insert(pos, {j, weight});
  auto& rlist = adj_[j];
  auto rpos = std::lower_bound(
      rlist.begin(), rlist.end(), i,
      [](const std::pair<int, double>& p, int v) { return p.first < v; });
  rlist.insert(rpos, {i, weight});
  edges_.push_back(GraphEdge{i, j, weight});
}

bool SimilarityGraph::HasEdge(int i, int j) const {
  if (i < 1 || i > node_count_ || j < 1 || j > node_count_ || i == j) {
    return false;
  }
  const auto& list = adj_[i];
  auto pos = std::lower_bound(
      list.begin(), list.end(), j,
      [](const std::pair<int, double>& p, int v) { return p.first < v; });
  return pos != list.end() && pos->first == j;
}

const std::vector<std::pair<int, double>>& SimilarityGraph::Neighbors(
    int i) const {
  if (i < 1 || i > node_count_) {
    throw std::invalid_argument("node index out of range");
  }
  return adj_[i];
}

GraphStrategy ParseGraphStrategy(const std::string& name) {
  if (name == "exact") return GraphStrategy::kExact;
  if (name == "dp") return GraphStrategy::kDp;
  if (name == "mpc") return GraphStrategy::kMpc;
  if (name == "hybrid") return GraphStrategy::kHybrid;
  throw std::invalid_argument("unknown graph strategy: " + name);
}

const char* GraphStrategyName(GraphStrategy s) {
  switch (s) {
    case GraphStrategy::kExact: return "exact";
    case GraphStrategy::kDp: return "dp";
    case GraphStrategy::kMpc: return "mpc";
    case GraphStrategy::kHybrid: return "hybrid";
  }
  return "unknown";
}

void ValidateGraphConfig(const GraphBuildConfig& config) {
  if (!(config.r > 0.0 && config.r < 1.0)) {
    throw std::invalid_argument("similarity threshold r must be in (0, 1)");
  }
  if (!(config.r_l <= config.r && config.r <= config.r_u)) {
    throw std::invalid_argument("filter thresholds must satisfy r_l <= r <= r_u");
  }
  if (!(config.epsilon_graph > 0.0)) {
    throw std::invalid_argument("epsilon_graph must be positive");
  }
}

double CosineSimilarity(const CountVector& a, const CountVector& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("cosine inputs must have equal length");
  }
  double dot = 0.0, na2 = 0.0, nb2 = 0.0;
  for (size_t t = 0; t < a.values.size(); ++t) {
    dot += a.values[t] * b.values[t];
    na2 += a.values[t] * a.values[t];
    nb2 += b.values[t] * b.values[t];
  }
  if (!(na2 > 0.0) || !(nb2 > 0.0)) return 0.0;
  const double cosine = dot / std::sqrt(na2 * nb2);
  return std::min(1.0, std::max(-1.0, cosine));
}

std::vector<CountVector> BuildNoisyVectors(std::span<const SpatialSilo> silos,
                                           const GridSpec& grid,
                                           PrivacyBudget epsilon_graph,
                                           uint64_t master_seed,
                                           ReleaseAudit* audit) {
  std::vector<CountVector> vectors;
  vectors.reserve(silos.size());
  for (const SpatialSilo& silo : silos) {
    RngStream rng = DeriveStream(master_seed, "graph-noise", silo.owner_id());
    vectors.push_back(NoisyCountVector(silo, grid, epsilon_graph, rng, audit));
  }
  return vectors;
}

SimilarityGraph BuildExactGraph(std::span<const SpatialSilo> silos,
                                const GridSpec& grid, double r,
                                ReleaseAudit* audit) {
  const int m = static_cast<int>(silos.size());
  std::vector<CountVector> vectors;
  vectors.reserve(m);
  for (const SpatialSilo& silo : silos) {
    vectors.push_back(BuildCountVector(silo, grid));
    if (audit != nullptr) {
      audit->Record(silo.owner_id(), ReleaseKind::kExactVector);
    }
  }
  SimilarityGraph graph(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double w = CosineSimilarity(vectors[i], vectors[j]);
      if (w > r) graph.AddEdge(i + 1, j + 1, w);
    }
  }
  return graph;
}

SimilarityGraph BuildDpGraph(const std::vector<CountVector>& noisy_vectors,
                             double r) {
  const int m = static_cast<int>(noisy_vectors.size());
  for (const CountVector& v : noisy_vectors) {
    if (v.kind != VectorKind::kNoisy || !v.epsilon_used.has_value()) {
      throw std::invalid_argument(
          "exact vector in the dp graph path: release boundary violation");
    }
    if (v.epsilon_used != noisy_vectors.front().epsilon_used) {
      throw std::invalid_argument("noisy vectors built at mixed budgets");
    }
  }
  SimilarityGraph graph(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double w = CosineSimilarity(noisy_vectors[i], noisy_vectors[j]);
      if (w > r) graph.AddEdge(i + 1, j + 1, w);
    }
  }
  return graph;
}

namespace {

void AccumulateCost(MpcCost& total, const MpcCost& part) {
  total.rounds += part.rounds;
  total.bytes += part.bytes;
  total.simulated_latency_ms += part.simulated_latency_ms;
}

int64_t PairSessionId(int i, int j) {
  return (static_cast<int64_t>(i) << 32) | static_cast<int64_t>(j);
}

}  // namespace

MpcGraphResult BuildMpcGraph(std::span<const SpatialSilo> silos,
                             const GridSpec& grid, double r,
                             uint64_t master_seed, double round_latency_ms,
                             ReleaseAudit* audit) {
  const int m = static_cast<int>(silos.size());
  std::vector<CountVector> vectors;
  vectors.reserve(m);
  for (const SpatialSilo& silo : silos) {
    vectors.push_back(BuildCountVector(silo, grid));
  }
  MpcGraphResult result{SimilarityGraph(m), MpcCost{}, 0};
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const int oa = silos[i].owner_id();
      const int ob = silos[j].owner_id();
      MpcSession session(DeriveStream(master_seed, "mpc-pair", oa, ob).NextU64(),
                         round_latency_ms, PairSessionId(oa, ob), audit);
      const double w = SecureCosine(session, vectors[i], vectors[j], oa, ob);
      AccumulateCost(result.cost, session.Cost());
      result.sessions += 1;
      if (w > r) result.graph.AddEdge(i + 1, j + 1, w);
    }
  }
  return result;
}

HybridGraphResult BuildHybridGraph(std::span<const SpatialSilo> silos,
                                   const GridSpec& grid,
                                   const GraphBuildConfig& config,
                                   uint64_t master_seed, ReleaseAudit* audit) {
  ValidateGraphConfig(config);
  const int m = static_cast<int>(silos.size());
  const std::vector<CountVector> noisy = BuildNoisyVectors(
      silos, grid, PrivacyBudget(config.epsilon_graph), master_seed, audit);
  // Exact vectors exist only as private inputs to escalated sessions.
  std::vector<CountVector> exact;
  exact.reserve(m);
  for (const SpatialSilo& silo : silos) {
    exact.push_back(BuildCountVector(silo, grid));
  }

  HybridGraphResult result{SimilarityGraph(m), MpcCost{}, HybridCounts{}};
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double noisy_w = CosineSimilarity(noisy[i], noisy[j]);
      if (noisy_w < config.r_l) {
        result.counts.pruned += 1;
        continue;
      }
      if (noisy_w > config.r_u) {
        result.counts.fast_inserted += 1;
        result.graph.AddEdge(i + 1, j + 1, noisy_w);
        continue;
      }
      const int oa = silos[i].owner_id();
      const int ob = silos[j].owner_id();
      MpcSession session(DeriveStream(master_seed, "mpc-pair", oa, ob).NextU64(),
                         config.round_latency_ms, PairSessionId(oa, ob), audit);
      const double exact_w = SecureCosine(session, exact[i], exact[j], oa, ob);
      AccumulateCost(result.cost, session.Cost());
      result.counts.mpc_resolved += 1;
      if (exact_w > config.r) result.graph.AddEdge(i + 1, j + 1, exact_w);
    }
  }
  return result;
}

EdgeFidelity ComputeEdgeFidelity(const SimilarityGraph& candidate,
                                 const SimilarityGraph& truth) {
  if (candidate.node_count() != truth.node_count()) {
    throw std::invalid_argument("fidelity requires matching node counts");
  }
  int64_t true_positive = 0;
  for (const GraphEdge& e : candidate.edges()) {
    if (truth.HasEdge(e.a, e.b)) ++true_positive;
  }
  EdgeFidelity f;
  f.precision = candidate.edge_count() == 0
                    ? 1.0
                    : static_cast<double>(true_positive) /
                          static_cast<double>(candidate.edge_count());
  f.recall = truth.edge_count() == 0
                 ? 1.0
                 : static_cast<double>(true_positive) /
                       static_cast<double>(truth.edge_count());
  f.f1 = (f.precision + f.recall) > 0.0
             ? 2.0 * f.precision * f.recall / (f.precision + f.recall)
             : 0.0;
  return f;
}

void WriteGraph(std::ostream& out, const SimilarityGraph& graph, double r) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d %.6f\n", graph.node_count(), r);
  out << buf;
  for (const GraphEdge& e : graph.edges()) {
    std::snprintf(buf, sizeof(buf), "%d %d %.6f\n", e.a, e.b, e.weight);
    out << buf;
  }
}

GraphFile ReadGraph(std::istream& in) {
  int m = -1;
  double r = 0.0;
  if (!(in >> m >> r)) {
    throw std::runtime_error("graph file: bad header");
  }
  GraphFile file{SimilarityGraph(m), r};
  int i = 0, j = 0;
  double w = 0.0;
  while (in >> i >> j >> w) {
    file.graph.AddEdge(i, j, w);
  }
  return file;
}

GraphFile ReadGraphFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return ReadGraph(in);
}

void WriteGraphFile(const std::string& path, const SimilarityGraph& graph,
                    double r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  WriteGraph(out, graph, r);
}

}  // namespace fedspatial
