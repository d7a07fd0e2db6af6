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

#ifndef FEDSPATIAL_SIMGRAPH_HPP_
#define FEDSPATIAL_SIMGRAPH_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fedspatial/mpcsim.hpp"
#include "fedspatial/silo.hpp"

namespace fedspatial {

struct GraphEdge {
  int a = 0;  // a < b, both in [1..m]
  int b = 0;
  double weight = 0.0;
};

// Weighted undirected graph over data owners. No self-loops, no duplicate
// edges. Exact-strategy graphs only store edges with weight in (r, 1].
class SimilarityGraph {
 public:
  explicit SimilarityGraph(int node_count);

  void AddEdge(int i, int j, double weight);
  bool HasEdge(int i, int j) const;
  int node_count() const { return node_count_; }
  int64_t edge_count() const { return static_cast<int64_t>(edges_.size()); }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  // Sorted (neighbor, weight) list for 1-based node i.
  const std::vector<std::pair<int, double>>& Neighbors(int i) const;

 private:
  int node_count_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

enum class GraphStrategy { kExact, kDp, kMpc, kHybrid };

GraphStrategy ParseGraphStrategy(const std::string& name);
const char* GraphStrategyName(GraphStrategy s);

struct GraphBuildConfig {
  double r = 0.5;
  double r_l = 0.4;
  double r_u = 0.6;
  GraphStrategy strategy = GraphStrategy::kHybrid;
  double epsilon_graph = 0.3;
  double round_latency_ms = 1.0;
};

void ValidateGraphConfig(const GraphBuildConfig& config);

// Plain cosine similarity of two count vectors of equal length; 0 when
// either norm is zero.
double CosineSimilarity(const CountVector& a, const CountVector& b);

// One noisy vector per silo at epsilon_graph, streams keyed by owner id so
// every strategy sees identical noisy vectors for a fixed master seed.
std::vector<CountVector> BuildNoisyVectors(std::span<const SpatialSilo> silos,
                                           const GridSpec& grid,
                                           PrivacyBudget epsilon_graph,
                                           uint64_t master_seed,
                                           ReleaseAudit* audit = nullptr);

// Non-private reference: edge (i, j) iff cos(v_i, v_j) > r over exact
// vectors. When an audit is supplied the exact-vector releases are logged
// (and flagged by any scan), which is the point: this path is the privacy
// breakdown reference.
SimilarityGraph BuildExactGraph(std::span<const SpatialSilo> silos,
                                const GridSpec& grid, double r,
                                ReleaseAudit* audit = nullptr);

// DP-only: edge iff noisy cosine > r, weight keeps the noisy value.
// Rejects exact vectors (release-boundary violation).
SimilarityGraph BuildDpGraph(const std::vector<CountVector>& noisy_vectors,
                             double r);

struct MpcGraphResult {
  SimilarityGraph graph;
  MpcCost cost;
  int64_t sessions = 0;
};

// MPC-only: every pair goes through a secure cosine session.
MpcGraphResult BuildMpcGraph(std::span<const SpatialSilo> silos,
                             const GridSpec& grid, double r,
                             uint64_t master_seed,
                             double round_latency_ms = 1.0,
                             ReleaseAudit* audit = nullptr);

struct HybridCounts {
  int64_t pruned = 0;
  int64_t fast_inserted = 0;
  int64_t mpc_resolved = 0;
};

struct HybridGraphResult {
  SimilarityGraph graph;
  MpcCost cost;
  HybridCounts counts;
};

// Noisy-cosine filter: prune below r_l, insert above r_u with the noisy
// weight, escalate the borderline band to a secure cosine and insert iff
// the exact weight beats r.
HybridGraphResult BuildHybridGraph(std::span<const SpatialSilo> silos,
                                   const GridSpec& grid,
                                   const GraphBuildConfig& config,
                                   uint64_t master_seed,
                                   ReleaseAudit* audit = nullptr);

struct EdgeFidelity {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
};

// Set metrics over edge presence; weights are ignored. An empty candidate
// has precision 1 by convention.
EdgeFidelity ComputeEdgeFidelity(const SimilarityGraph& candidate,
                                 const SimilarityGraph& truth);

// Text format: header "m r", then one "i j w" line per edge, w with six
// decimals.
void WriteGraph(std::ostream& out, const SimilarityGraph& graph, double r);

struct GraphFile {
  SimilarityGraph graph;
  double r = 0.5;
};

GraphFile ReadGraph(std::istream& in);
GraphFile ReadGraphFile(const std::string& path);
void WriteGraphFile(const std::string& path, const SimilarityGraph& graph,
                    double r);

}  // namespace fedspatial

#endif  // FEDSPATIAL_SIMGRAPH_HPP_
