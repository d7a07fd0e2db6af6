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

#include "fedspatial/grouping.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fedspatial {

std::vector<std::vector<int>> GroupMembers(const Grouping& grouping) {
  std::vector<std::vector<int>> members(grouping.lambda + 1);
  for (int u = 1; u <= grouping.owner_count(); ++u) {
    const int gid = grouping.group_of[u];
    if (gid >= 1 && gid <= grouping.lambda) members[gid].push_back(u);
  }
  return members;
}

GroupConstraint GroupConstraint::Global(int t) {
  if (t < 1) throw std::invalid_argument("global size limit must be >= 1");
  GroupConstraint c;
  c.kind = ConstraintKind::kGlobal;
  c.global_limit = t;
  return c;
}

GroupConstraint GroupConstraint::Personal(std::vector<int> limits) {
  GroupConstraint c;
  c.kind = ConstraintKind::kPersonal;
  c.personal_limit = std::move(limits);
  return c;
}

AdjacencyGraph AdjacencyOf(const SimilarityGraph& graph) {
  AdjacencyGraph adj;
  adj.node_count = graph.node_count();
  adj.neighbors.resize(adj.node_count + 1);
  for (int u = 1; u <= adj.node_count; ++u) {
    for (const auto& [v, w] : graph.Neighbors(u)) {
      adj.neighbors[u].push_back(v);
    }
  }
  return adj;
}

namespace {

AdjacencyGraph ComplementOfLists(int m,
                                 const std::vector<std::vector<int>>& lists) {
  AdjacencyGraph out;
  out.node_count = m;
  out.neighbors.resize(m + 1);
  std::vector<char> is_neighbor(m + 1, 0);
  for (int u = 1; u <= m; ++u) {
    for (int v : lists[u]) is_neighbor[v] = 1;
    for (int v = 1; v <= m; ++v) {
      if (v != u && !is_neighbor[v]) out.neighbors[u].push_back(v);
    }
    for (int v : lists[u]) is_neighbor[v] = 0;
  }
  return out;
}

}  // namespace

AdjacencyGraph Complement(const SimilarityGraph& graph) {
  return ComplementOfLists(graph.node_count(), AdjacencyOf(graph).neighbors);
}

AdjacencyGraph Complement(const AdjacencyGraph& graph) {
  return ComplementOfLists(graph.node_count, graph.neighbors);
}

Grouping GreedyGroup(const SimilarityGraph& graph,
                     const GroupConstraint& constraint) {
  const int m = graph.node_count();
  if (constraint.kind == ConstraintKind::kPersonal) {
    if (static_cast<int>(constraint.personal_limit.size()) != m + 1) {
      throw std::invalid_argument("personal limits: one entry per owner");
    }
    for (int u = 1; u <= m; ++u) {
      if (constraint.personal_limit[u] < 1) {
        throw std::invalid_argument("personal size limit must be >= 1");
      }
    }
  }

  const AdjacencyGraph comp = Complement(graph);
  Grouping grouping;
  grouping.group_of.assign(m + 1, 0);
  grouping.lambda = 0;

  std::vector<int> used_by(m + 2, 0);  // group id -> stamp of last conflict
  std::vector<int> group_size(m + 2, 0);
  std::vector<int> group_min_limit(m + 2, std::numeric_limits<int>::max());

  for (int u = 1; u <= m; ++u) {
    for (int v : comp.neighbors[u]) {
      const int gid = grouping.group_of[v];
      if (gid != 0) used_by[gid] = u;
    }
    int chosen = 0;
    for (int gid = 1; gid <= grouping.lambda + 1; ++gid) {
      if (used_by[gid] == u) continue;
      if (constraint.kind == ConstraintKind::kGlobal &&
          group_size[gid] + 1 > constraint.global_limit) {
        continue;
      }
      if (constraint.kind == ConstraintKind::kPersonal) {
        const int limit =
            std::min(constraint.personal_limit[u], group_min_limit[gid]);
        if (group_size[gid] + 1 > limit) continue;
      }
      chosen = gid;
      break;
    }
    grouping.group_of[u] = chosen;
    group_size[chosen] += 1;
    if (constraint.kind == ConstraintKind::kPersonal) {
      group_min_limit[chosen] =
          std::min(group_min_limit[chosen], constraint.personal_limit[u]);
    }
    grouping.lambda = std::max(grouping.lambda, chosen);
  }
  return grouping;
}

namespace {

// Exact maximum clique over the subgraph induced by `active`, branch and
// bound with a greedy coloring upper bound. Vertices are 1-based graph ids;
// ordering is deterministic (ascending id at every step).
class MaxCliqueSolver {
 public:
  explicit MaxCliqueSolver(const SimilarityGraph& graph) : graph_(graph) {}

  std::vector<int> Solve(const std::vector<int>& active) {
    best_.clear();
    current_.clear();
    Expand(active);
    std::vector<int> result = best_;
    std::sort(result.begin(), result.end());
    return result;
  }

 private:
  void Expand(const std::vector<int>& candidates) {
    if (candidates.empty()) {
      if (current_.size() > best_.size()) best_ = current_;
      return;
    }
    // Greedy coloring: color[i] is an upper bound on the clique size within
    // candidates[0..i], so scanning from the back prunes early.
    const int n = static_cast<int>(candidates.size());
    std::vector<int> color(n, 0);
    std::vector<std::vector<int>> color_classes;
    for (int i = 0; i < n; ++i) {
      const int v = candidates[i];
      int c = 0;
      for (; c < static_cast<int>(color_classes.size()); ++c) {
        bool conflicts = false;
        for (int u : color_classes[c]) {
          if (graph_.HasEdge(u, v)) {
            conflicts = true;
            break;
          }
        }
        if (!conflicts) break;
      }
      if (c == static_cast<int>(color_classes.size())) {
        color_classes.emplace_back();
      }
      color_classes[c].push_back(v);
      color[i] = c + 1;
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return color[a] < color[b]; });

    std::vector<int> sorted(n);
    std::vector<int> bound(n);
    for (int i = 0; i < n; ++i) {
      sorted[i] = candidates[order[i]];
      bound[i] = color[order[i]];
    }
    for (int i = n - 1; i >= 0; --i) {
      if (current_.size() + bound[i] <= best_.size()) return;
      const int v = sorted[i];
      current_.push_back(v);
      std::vector<int> next;
      next.reserve(i);
      for (int k = 0; k < i; ++k) {
        if (graph_.HasEdge(sorted[k], v)) next.push_back(sorted[k]);
      }
      Expand(next);
      current_.pop_back();
    }
  }

  const SimilarityGraph& graph_;
  std::vector<int> best_;
  std::vector<int> current_;
};

}  // namespace

Grouping ExhaustiveGroup(const SimilarityGraph& graph, int node_cap) {
  const int m = graph.node_count();
  if (m > node_cap) {
    throw std::invalid_argument(
        "exhaustive grouping refused: " + std::to_string(m) +
        " nodes exceeds the cap of " + std::to_string(node_cap));
  }
  Grouping grouping;
  grouping.group_of.assign(m + 1, 0);
  grouping.lambda = 0;

  std::vector<int> unassigned;
  for (int u = 1; u <= m; ++u) unassigned.push_back(u);
  MaxCliqueSolver solver(graph);
  while (!unassigned.empty()) {
    const std::vector<int> clique = solver.Solve(unassigned);
    grouping.lambda += 1;
    for (int u : clique) grouping.group_of[u] = grouping.lambda;
    std::vector<int> rest;
    rest.reserve(unassigned.size() - clique.size());
    for (int u : unassigned) {
      if (!std::binary_search(clique.begin(), clique.end(), u)) {
        rest.push_back(u);
      }
    }
    unassigned.swap(rest);
  }
  return grouping;
}

Grouping OptimalGroupBruteForce(const SimilarityGraph& graph) {
  const int m = graph.node_count();
  if (m > 12) {
    throw std::invalid_argument("brute-force oracle limited to 12 nodes");
  }
  Grouping grouping;
  grouping.group_of.assign(m + 1, 0);
  grouping.lambda = 0;
  if (m == 0) return grouping;

  std::vector<uint32_t> adj(m, 0);
  for (const GraphEdge& e : graph.edges()) {
    adj[e.a - 1] |= 1u << (e.b - 1);
    adj[e.b - 1] |= 1u << (e.a - 1);
  }
  const uint32_t full = (m == 32) ? 0xFFFFFFFFu : ((1u << m) - 1);

  // is_clique by peeling the lowest vertex; dp over subsets picks, for each
  // mask, a clique containing its lowest vertex.
  std::vector<char> is_clique(full + 1, 0);
  is_clique[0] = 1;
  for (uint32_t mask = 1; mask <= full; ++mask) {
    const int low = __builtin_ctz(mask);
    const uint32_t rest = mask & (mask - 1);
    is_clique[mask] = is_clique[rest] && ((adj[low] & rest) == rest);
  }
  constexpr int kInf = 1 << 20;
  std::vector<int> dp(full + 1, kInf);
  std::vector<uint32_t> choice(full + 1, 0);
  dp[0] = 0;
  for (uint32_t mask = 1; mask <= full; ++mask) {
    const uint32_t low_bit = mask & (~mask + 1);
    for (uint32_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
      if (!(sub & low_bit) || !is_clique[sub]) continue;
      if (dp[mask ^ sub] + 1 < dp[mask]) {
        dp[mask] = dp[mask ^ sub] + 1;
        choice[mask] = sub;
      }
    }
  }

  uint32_t mask = full;
  while (mask != 0) {
    const uint32_t part = choice[mask];
    grouping.lambda += 1;
    for (int v = 0; v < m; ++v) {
      if (part & (1u << v)) grouping.group_of[v + 1] = grouping.lambda;
    }
    mask ^= part;
  }
  return grouping;
}

std::vector<std::string> ValidateGrouping(const SimilarityGraph& graph,
                                          const Grouping& grouping,
                                          const GroupConstraint& constraint) {
  std::vector<std::string> violations;
  const int m = graph.node_count();
  if (grouping.owner_count() != m) {
    violations.push_back("grouping covers " +
                         std::to_string(grouping.owner_count()) +
                         " owners, graph has " + std::to_string(m));
    return violations;
  }
  for (int u = 1; u <= m; ++u) {
    const int gid = grouping.group_of[u];
    if (gid < 1 || gid > grouping.lambda) {
      violations.push_back("owner " + std::to_string(u) +
                           " has group id outside [1, lambda]");
    }
  }
  const auto members = GroupMembers(grouping);
  for (int gid = 1; gid <= grouping.lambda; ++gid) {
    const auto& g = members[gid];
    if (g.empty()) {
      violations.push_back("group " + std::to_string(gid) + " is empty");
      continue;
    }
    for (size_t i = 0; i < g.size(); ++i) {
      for (size_t j = i + 1; j < g.size(); ++j) {
        if (!graph.HasEdge(g[i], g[j])) {
          violations.push_back("group " + std::to_string(gid) +
                               " is not a clique: owners " +
                               std::to_string(g[i]) + " and " +
                               std::to_string(g[j]) + " share no edge");
        }
      }
    }
    const int size = static_cast<int>(g.size());
    if (constraint.kind == ConstraintKind::kGlobal &&
        size > constraint.global_limit) {
      violations.push_back("group " + std::to_string(gid) + " has size " +
                           std::to_string(size) + " over the global limit " +
                           std::to_string(constraint.global_limit));
    }
    if (constraint.kind == ConstraintKind::kPersonal) {
      for (int u : g) {
        if (u < static_cast<int>(constraint.personal_limit.size()) &&
            size > constraint.personal_limit[u]) {
          violations.push_back("group " + std::to_string(gid) + " size " +
                               std::to_string(size) +
                               " violates the personal limit of owner " +
                               std::to_string(u));
        }
      }
    }
  }
  return violations;
}

void WriteGrouping(std::ostream& out, const Grouping& grouping) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d %d\n", grouping.owner_count(),
                grouping.lambda);
  out << buf;
  for (int u = 1; u <= grouping.owner_count(); ++u) {
    std::snprintf(buf, sizeof(buf), "%d %d\n", u, grouping.group_of[u]);
    out << buf;
  }
}

Grouping ReadGrouping(std::istream& in) {
  int m = -1, lambda = -1;
  if (!(in >> m >> lambda) || m < 0 || lambda < 0) {
    throw std::runtime_error("grouping file: bad header");
  }
  Grouping grouping;
  grouping.group_of.assign(m + 1, 0);
  grouping.lambda = lambda;
  int owner = 0, gid = 0;
  for (int i = 0; i < m; ++i) {
    if (!(in >> owner >> gid) || owner < 1 || owner > m || gid < 1 ||
        gid > lambda) {
      throw std::runtime_error("grouping file: bad assignment line");
    }
    grouping.group_of[owner] = gid;
  }
  return grouping;
}

Grouping ReadGroupingFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grouping file: " + path);
  return ReadGrouping(in);
}

void WriteGroupingFile(const std::string& path, const Grouping& grouping) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grouping file: " + path);
  WriteGrouping(out, grouping);
}

}  // namespace fedspatial
