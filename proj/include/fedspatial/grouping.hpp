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

#ifndef FEDSPATIAL_GROUPING_HPP_
#define FEDSPATIAL_GROUPING_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "fedspatial/simgraph.hpp"

namespace fedspatial {

// Disjoint partition of owners into groups 1..lambda. Every group must be a
// clique of the source similarity graph (all stored edges already exceed the
// threshold r, so cliques are exactly the valid groups).
struct Grouping {
  std::vector<int> group_of;  // 1-based; group_of[0] unused
  int lambda = 0;

  int owner_count() const { return static_cast<int>(group_of.size()) - 1; }
};

// Owners per group id (index 0 unused).
std::vector<std::vector<int>> GroupMembers(const Grouping& grouping);

enum class ConstraintKind { kNone, kGlobal, kPersonal };

struct GroupConstraint {
  ConstraintKind kind = ConstraintKind::kNone;
  int global_limit = 0;
  std::vector<int> personal_limit;  // 1-based per owner

  static GroupConstraint None() { return {}; }
  static GroupConstraint Global(int t);
  static GroupConstraint Personal(std::vector<int> limits);
};

// Unweighted adjacency view, used for complement graphs.
struct AdjacencyGraph {
  int node_count = 0;
  std::vector<std::vector<int>> neighbors;  // 1-based, each list sorted
};

AdjacencyGraph AdjacencyOf(const SimilarityGraph& graph);
AdjacencyGraph Complement(const SimilarityGraph& graph);
AdjacencyGraph Complement(const AdjacencyGraph& graph);

// Greedy grouping: vertices in ascending owner id, each assigned the lowest
// group id unused by its complement-graph neighbors whose group can still
// accept it. Unconstrained, this returns at most (max complement degree + 1)
// groups. Under a personal constraint an owner may only join a group whose
// size after admission respects every current member's limit as well as its
// own.
Grouping GreedyGroup(const SimilarityGraph& graph,
                     const GroupConstraint& constraint = GroupConstraint());

// Repeatedly extracts a maximum clique among unassigned vertices into a new
// group. Exact maximum-clique search (branch and bound with a greedy
// coloring bound), so only tractable on small graphs; refuses node counts
// beyond the cap.
Grouping ExhaustiveGroup(const SimilarityGraph& graph, int node_cap = 200);

// Exact minimum clique partition by dynamic programming over vertex
// subsets. Oracle for small graphs; refuses more than 12 nodes.
Grouping OptimalGroupBruteForce(const SimilarityGraph& graph);

// Checks coverage, group-id consistency, the pairwise-edge (clique)
// condition, and constraint satisfaction. Violations are returned as data,
// not thrown.
std::vector<std::string> ValidateGrouping(
    const SimilarityGraph& graph, const Grouping& grouping,
    const GroupConstraint& constraint = GroupConstraint());

// Text format: header "m lambda", then one "owner_id group_id" line per
// owner.
void WriteGrouping(std::ostream& out, const Grouping& grouping);
Grouping ReadGrouping(std::istream& in);
Grouping ReadGroupingFile(const std::string& path);
void WriteGroupingFile(const std::string& path, const Grouping& grouping);

}  // namespace fedspatial

#endif  // FEDSPATIAL_GROUPING_HPP_
