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

#include "fedspatial/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"
#include "fedspatial/engine.hpp"
#include "fedspatial/grouping.hpp"
#include "fedspatial/simgraph.hpp"

namespace fedspatial {

namespace {

uint64_t DoubleBits(double x) {
  uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return bits;
}

struct Dataset {
  std::vector<SpatialSilo> silos;
  GridSpec grid;
  std::vector<int> cluster_of;  // empty for file data
};

Dataset LoadDataset(const std::string& data_path, const SyntheticSpec& synth,
                    int m, int cells_per_axis, uint64_t master_seed,
                    std::ostream& err) {
  Dataset ds;
  if (!data_path.empty()) {
    LoadResult loaded = LoadCheckins(data_path, m, cells_per_axis);
    if (loaded.skipped_lines > 0) {
      err << "note: skipped " << loaded.skipped_lines
          << " malformed lines in " << data_path << "\n";
    }
    ds.silos = std::move(loaded.silos);
    ds.grid = loaded.grid;
  } else {
    SyntheticSpec spec = synth;
    spec.m = m;
    spec.cluster_count = std::min(spec.cluster_count, m);
    spec.cells_per_axis = cells_per_axis;
    spec.seed = DeriveStream(master_seed, "dataset", m).NextU64();
    SyntheticResult gen = GenerateSynthetic(spec);
    ds.silos = std::move(gen.silos);
    ds.grid = gen.grid;
    ds.cluster_of = std::move(gen.cluster_of);
  }
  return ds;
}

SimilarityGraph BuildGraphByStrategy(const std::string& strategy,
                                     std::span<const SpatialSilo> silos,
                                     const GridSpec& grid,
                                     const GraphBuildConfig& config,
                                     uint64_t seed, ReleaseAudit* audit) {
  switch (ParseGraphStrategy(strategy)) {
    case GraphStrategy::kExact:
      return BuildExactGraph(silos, grid, config.r);
    case GraphStrategy::kDp:
      return BuildDpGraph(
          BuildNoisyVectors(silos, grid, PrivacyBudget(config.epsilon_graph),
                            seed, audit),
          config.r);
    case GraphStrategy::kMpc:
      return BuildMpcGraph(silos, grid, config.r, seed,
                           config.round_latency_ms, audit)
          .graph;
    case GraphStrategy::kHybrid:
      return BuildHybridGraph(silos, grid, config, seed, audit).graph;
  }
  throw std::invalid_argument("unknown graph strategy");
}

Grouping GroupByAlgo(const std::string& algo, const SimilarityGraph& graph,
                     int global_limit, int clique_cap) {
  const GroupConstraint constraint =
      global_limit > 0 ? GroupConstraint::Global(global_limit)
                       : GroupConstraint::None();
  if (algo == "greedy") return GreedyGroup(graph, constraint);
  if (algo == "exhaustive") return ExhaustiveGroup(graph, clique_cap);
  if (algo == "bruteforce") return OptimalGroupBruteForce(graph);
  throw std::invalid_argument("unknown grouping algorithm: " + algo);
}

int MaxComplementDegree(const SimilarityGraph& graph) {
  const int m = graph.node_count();
  int max_degree = 0;
  for (int u = 1; u <= m; ++u) {
    const int comp_degree =
        m - 1 - static_cast<int>(graph.Neighbors(u).size());
    max_degree = std::max(max_degree, comp_degree);
  }
  return max_degree;
}

}  // namespace

int CmdGenData(const GenDataOptions& options, std::ostream& err) {
  ValidateSyntheticSpec(options.spec);
  if (options.spec.box_min_y < -90.0 || options.spec.box_max_y > 90.0 ||
      options.spec.box_min_x < -180.0 || options.spec.box_max_x > 180.0) {
    throw std::invalid_argument(
        "domain box must fit the check-in coordinate ranges");
  }
  if (options.out.empty()) {
    throw std::invalid_argument("gen-data requires --out");
  }
  SyntheticResult result = GenerateSynthetic(options.spec);
  WriteCheckins(options.out, result.silos);
  if (!options.labels_out.empty()) {
    WriteClusterLabels(options.labels_out, result.cluster_of);
  }
  err << "wrote " << result.silos.size() << " silos to " << options.out
      << "\n";
  return 0;
}

int CmdBuildGraph(const BuildGraphOptions& options, std::ostream& out,
                  std::ostream& err) {
  GraphBuildConfig config;
  config.r = options.r;
  config.r_l = options.r_l;
  config.r_u = options.r_u;
  config.epsilon_graph = options.epsilon_graph;
  config.round_latency_ms = options.round_latency_ms;
  config.strategy = ParseGraphStrategy(options.strategy);
  ValidateGraphConfig(config);

  LoadResult loaded =
      LoadCheckins(options.data_path, options.limit_owners,
                   options.cells_per_axis);
  if (loaded.skipped_lines > 0) {
    err << "note: skipped " << loaded.skipped_lines << " malformed lines\n";
  }
  ReleaseAudit audit;
  ReleaseAudit* audit_ptr =
      config.strategy == GraphStrategy::kExact ? nullptr : &audit;
  SimilarityGraph graph =
      BuildGraphByStrategy(options.strategy, loaded.silos, loaded.grid,
                           config, options.seed, audit_ptr);
  if (!options.out.empty()) {
    WriteGraphFile(options.out, graph, config.r);
  }
  out << "strategy: " << options.strategy << "\n";
  out << "owners: " << graph.node_count() << "\n";
  out << "edges: " << graph.edge_count() << "\n";
  if (audit_ptr != nullptr) {
    out << "epsilon_graph_consumed_total: " << audit.EpsilonConsumed()
        << "\n";
  }
  if (options.compare_exact) {
    SimilarityGraph exact =
        BuildExactGraph(loaded.silos, loaded.grid, config.r);
    const EdgeFidelity fidelity = ComputeEdgeFidelity(graph, exact);
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "precision: %.6f\nrecall: %.6f\nf1: %.6f\n",
                  fidelity.precision, fidelity.recall, fidelity.f1);
    out << buf;
  }
  return 0;
}

int CmdGroup(const GroupCmdOptions& options, std::ostream& out,
             std::ostream& err) {
  (void)err;
  GraphFile file = ReadGraphFile(options.graph_path);
  const Grouping grouping = GroupByAlgo(options.algo, file.graph,
                                        options.global_limit,
                                        options.clique_cap);
  const GroupConstraint constraint =
      options.global_limit > 0 ? GroupConstraint::Global(options.global_limit)
                               : GroupConstraint::None();
  const auto violations = ValidateGrouping(file.graph, grouping, constraint);
  if (!violations.empty()) {
    throw std::runtime_error("grouping validation failed: " + violations[0]);
  }
  if (!options.out.empty()) {
    WriteGroupingFile(options.out, grouping);
  }
  const int bound = MaxComplementDegree(file.graph) + 1;
  out << "owners: " << grouping.owner_count() << "\n";
  out << "lambda: " << grouping.lambda << "\n";
  out << "bound_d_plus_1: " << bound << "\n";
  out << "bound_holds: "
      << ((options.algo != "greedy" || grouping.lambda <= bound) ? "yes"
                                                                 : "no")
      << "\n";
  return 0;
}

int CmdQuery(const QueryCmdOptions& options, std::ostream& out,
             std::ostream& err) {
  LoadResult loaded = LoadCheckins(options.data_path, options.limit_owners,
                                   options.cells_per_axis);
  if (loaded.skipped_lines > 0) {
    err << "note: skipped " << loaded.skipped_lines << " malformed lines\n";
  }
  Federation fed;
  fed.silos = std::move(loaded.silos);
  fed.grid = loaded.grid;
  const EngineKind engine = ParseEngineKind(options.engine);
  if (engine == EngineKind::kFedGroup) {
    if (options.grouping_path.empty()) {
      throw std::invalid_argument("fedgroup engine requires --grouping");
    }
    fed.grouping = ReadGroupingFile(options.grouping_path);
  }
  ValidateFederation(fed);

  const RangeQuery q{Location{options.center_x, options.center_y},
                     options.radius};
  ReleaseAudit audit;
  EngineOptions engine_options;
  engine_options.master_seed = options.seed;
  engine_options.round_latency_ms = options.round_latency_ms;
  engine_options.audit = &audit;
  const QueryResult result =
      AnswerCount(fed, q, engine, PrivacyBudget(options.epsilon),
                  engine_options);

  char buf[256];
  out << "engine: " << EngineKindName(result.engine) << "\n";
  std::snprintf(buf, sizeof(buf), "answer: %.6f\n", result.answer);
  out << buf;
  std::snprintf(buf, sizeof(buf), "true_answer: %.0f\n", result.true_answer);
  out << buf;
  std::snprintf(buf, sizeof(buf), "abs_error: %.6f\n",
                std::abs(result.answer - result.true_answer));
  out << buf;
  std::snprintf(buf, sizeof(buf), "epsilon: %.6g\n", result.epsilon_query);
  out << buf;
  out << "lambda_or_m: " << result.lambda_or_m << "\n";
  const MpcCost cost = result.mpc_cost.value_or(MpcCost{});
  out << "mpc_rounds: " << cost.rounds << "\n";
  out << "mpc_bytes: " << cost.bytes << "\n";
  std::snprintf(buf, sizeof(buf), "simulated_ms: %.3f\n", result.simulated_ms);
  out << buf;
  std::snprintf(buf, sizeof(buf), "epsilon_consumed_total: %.6g\n",
                audit.EpsilonConsumed());
  out << buf;
  const auto violations = audit.ScanViolations();
  out << "release_violations: " << violations.size() << "\n";
  return 0;
}

int CmdBench(const BenchCmdOptions& options, std::ostream& err) {
  if (options.out.empty()) {
    throw std::invalid_argument("bench requires --out");
  }
  if (options.trials < 2 || options.queries < 1) {
    throw std::invalid_argument("bench needs trials >= 2 and queries >= 1");
  }
  for (const std::string& engine : options.engines) {
    ParseEngineKind(engine);  // fail fast on typos
  }

  GraphBuildConfig graph_config;
  graph_config.r = options.r;
  graph_config.r_l = options.r_l;
  graph_config.r_u = options.r_u;
  graph_config.epsilon_graph = options.epsilon_graph;
  graph_config.round_latency_ms = options.round_latency_ms;
  graph_config.strategy = ParseGraphStrategy(options.graph_strategy);

  // Cells finished in a previous interrupted run are kept as-is.
  std::map<std::tuple<std::string, int, double>, BenchRow> done;
  if (options.resume) {
    try {
      for (BenchRow& row : ReadResultsCsvFile(options.out)) {
        done.emplace(std::make_tuple(row.engine, row.m, row.epsilon), row);
      }
      err << "resume: " << done.size() << " cells already present\n";
    } catch (const std::exception&) {
      // No usable previous output; start fresh.
    }
  }

  std::vector<BenchRow> rows;
  const bool wants_fedgroup =
      std::find(options.engines.begin(), options.engines.end(),
                "fedgroup") != options.engines.end();

  for (int m : options.m_list) {
    Dataset ds = LoadDataset(options.data_path, options.synth, m,
                             options.cells_per_axis, options.seed, err);
    Federation fed;
    fed.silos = std::move(ds.silos);
    fed.grid = ds.grid;

    if (wants_fedgroup) {
      const uint64_t graph_seed =
          DeriveStream(options.seed, "graph", m).NextU64();
      SimilarityGraph graph = BuildGraphByStrategy(
          options.graph_strategy, fed.silos, fed.grid, graph_config,
          graph_seed, nullptr);
      fed.grouping = GroupByAlgo(options.grouping_algo, graph,
                                 options.global_limit, /*clique_cap=*/200);
      err << "m=" << m << ": grouping lambda=" << fed.grouping->lambda
          << "\n";
    }
    ValidateFederation(fed);

    RngStream workload_rng = DeriveStream(options.seed, "workload", m);
    const std::vector<RangeQuery> queries =
        GenerateQueries(fed.silos, fed.grid, options.queries,
                        options.radius_fraction, workload_rng);

    for (double eps : options.eps_list) {
      for (const std::string& engine_name : options.engines) {
        const auto key = std::make_tuple(engine_name, m, eps);
        if (auto it = done.find(key); it != done.end()) {
          rows.push_back(it->second);
          continue;
        }
        const uint64_t cell_seed =
            DeriveStream(options.seed, "cell-" + engine_name, m,
                         DoubleBits(eps))
                .NextU64();
        BenchRow row;
        row.engine = engine_name;
        row.m = m;
        row.epsilon = eps;
        row.seed = cell_seed;

        const EngineKind engine = ParseEngineKind(engine_name);
        if (engine == EngineKind::kMpc && m > options.mpc_owner_cap) {
          row.mre = row.mae = row.var_emp = row.var_theory = row.wall_ms =
              std::numeric_limits<double>::quiet_NaN();
          err << "cell engine=" << engine_name << " m=" << m << " eps=" << eps
              << ": skipped (mpc owner cap " << options.mpc_owner_cap
              << ")\n";
          rows.push_back(row);
          continue;
        }

        try {
          std::vector<TrialOutcome> outcomes;
          outcomes.reserve(static_cast<size_t>(options.trials) *
                           queries.size());
          double err_sum = 0.0, err_sq_sum = 0.0;
          double simulated_ms_total = 0.0;
          int64_t rounds_total = 0, bytes_total = 0;
          int64_t lambda_or_m = 0;
          for (int trial = 0; trial < options.trials; ++trial) {
            for (size_t qi = 0; qi < queries.size(); ++qi) {
              EngineOptions eo;
              eo.master_seed = cell_seed;
              eo.trial = static_cast<uint64_t>(trial) * queries.size() + qi;
              eo.round_latency_ms = options.round_latency_ms;
              const QueryResult res =
                  AnswerCount(fed, queries[qi], engine, PrivacyBudget(eps),
                              eo);
              outcomes.push_back(TrialOutcome{res.answer, res.true_answer});
              const double e = res.answer - res.true_answer;
              err_sum += e;
              err_sq_sum += e * e;
              simulated_ms_total += res.simulated_ms;
              const MpcCost cost = res.mpc_cost.value_or(MpcCost{});
              rounds_total += cost.rounds;
              bytes_total += cost.bytes;
              lambda_or_m = res.lambda_or_m;
            }
          }
          const auto n = static_cast<double>(outcomes.size());
          row.lambda_or_m = lambda_or_m;
          row.mre = MeanRelativeError(outcomes);
          row.mae = MeanAbsoluteError(outcomes);
          row.var_emp =
              (err_sq_sum - err_sum * err_sum / n) / (n - 1.0);
          switch (engine) {
            case EngineKind::kPlaintext:
              row.var_theory = 0.0;
              break;
            case EngineKind::kDp:
              row.var_theory = 2.0 * m / (eps * eps);
              break;
            case EngineKind::kMpc:
              row.var_theory = 2.0 / (eps * eps);
              break;
            case EngineKind::kFedGroup:
              row.var_theory =
                  2.0 * static_cast<double>(lambda_or_m) / (eps * eps);
              break;
          }
          row.wall_ms = simulated_ms_total / n;
          row.mpc_rounds = rounds_total / static_cast<int64_t>(n);
          row.mpc_bytes = bytes_total / static_cast<int64_t>(n);
          err << "cell engine=" << engine_name << " m=" << m
              << " eps=" << eps << ": mae=" << row.mae
              << " var_emp/var_theory="
              << (row.var_theory > 0 ? row.var_emp / row.var_theory : 0.0)
              << "\n";
        } catch (const std::exception& e) {
          row.mre = row.mae = row.var_emp = row.var_theory = row.wall_ms =
              std::numeric_limits<double>::quiet_NaN();
          err << "cell engine=" << engine_name << " m=" << m << " eps=" << eps
              << ": failed (" << e.what() << "), continuing\n";
        }
        rows.push_back(row);
      }
    }
  }

  // Deterministic ordering regardless of sweep or resume order.
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.m, a.epsilon, a.engine) <
           std::tie(b.m, b.epsilon, b.engine);
  });
  WriteResultsCsvFile(options.out, rows);
  err << "wrote " << rows.size() << " rows to " << options.out << "\n";
  return 0;
}

namespace {

void BuildApp(CLI::App& app, GenDataOptions& gen, BuildGraphOptions& graph,
              GroupCmdOptions& group, QueryCmdOptions& query,
              BenchCmdOptions& bench) {
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key = value file");
  app.get_config_formatter_base()->comment('#');

  CLI::App* g = app.add_subcommand("gen-data", "generate a synthetic dataset");
  g->add_option("--m", gen.spec.m, "number of data owners");
  g->add_option("--records-min", gen.spec.records_min, "records per owner, lower bound");
  g->add_option("--records-max", gen.spec.records_max, "records per owner, upper bound");
  g->add_option("--clusters", gen.spec.cluster_count, "number of spatial clusters");
  g->add_option("--spread", gen.spec.cluster_spread, "per-cluster gaussian std");
  g->add_option("--box-min-x", gen.spec.box_min_x);
  g->add_option("--box-min-y", gen.spec.box_min_y);
  g->add_option("--box-max-x", gen.spec.box_max_x);
  g->add_option("--box-max-y", gen.spec.box_max_y);
  g->add_option("--seed", gen.spec.seed, "master seed");
  g->add_option("--out", gen.out, "output check-in file");
  g->add_option("--labels-out", gen.labels_out, "optional cluster label file");

  CLI::App* b = app.add_subcommand("build-graph", "build the similarity graph");
  b->add_option("--data", graph.data_path, "check-in dataset")->required();
  b->add_option("--limit-owners", graph.limit_owners, "cap on loaded owners");
  b->add_option("--grid", graph.cells_per_axis, "grid cells per axis");
  b->add_option("--strategy", graph.strategy, "exact | dp | mpc | hybrid");
  b->add_option("--r", graph.r, "similarity threshold");
  b->add_option("--r-l", graph.r_l, "hybrid lower filter threshold");
  b->add_option("--r-u", graph.r_u, "hybrid upper filter threshold");
  b->add_option("--eps-graph", graph.epsilon_graph, "graph construction budget");
  b->add_option("--round-latency-ms", graph.round_latency_ms);
  b->add_option("--seed", graph.seed, "master seed");
  b->add_option("--out", graph.out, "output graph file");
  b->add_flag("--compare-exact", graph.compare_exact,
              "also report edge precision/recall vs the exact graph");

  CLI::App* gr = app.add_subcommand("group", "partition owners into groups");
  gr->add_option("--graph", group.graph_path, "graph file")->required();
  gr->add_option("--algo", group.algo, "greedy | exhaustive | bruteforce");
  gr->add_option("--max-group-size", group.global_limit,
                 "global group size limit (0 = none)");
  gr->add_option("--clique-cap", group.clique_cap,
                 "node cap for the exhaustive algorithm");
  gr->add_option("--out", group.out, "output grouping file");

  CLI::App* q = app.add_subcommand("query", "answer one range counting query");
  q->add_option("--data", query.data_path, "check-in dataset")->required();
  q->add_option("--limit-owners", query.limit_owners);
  q->add_option("--grid", query.cells_per_axis);
  q->add_option("--engine", query.engine, "plaintext | dp | mpc | fedgroup");
  q->add_option("--eps", query.epsilon, "query budget");
  q->add_option("--grouping", query.grouping_path, "grouping file (fedgroup)");
  q->add_option("--center-x", query.center_x)->required();
  q->add_option("--center-y", query.center_y)->required();
  q->add_option("--radius", query.radius)->required();
  q->add_option("--round-latency-ms", query.round_latency_ms);
  q->add_option("--seed", query.seed, "master seed");

  CLI::App* be = app.add_subcommand("bench", "run a benchmark sweep");
  be->add_option("--data", bench.data_path,
                 "check-in dataset (omit to use synthetic data)");
  be->add_option("--records-min", bench.synth.records_min);
  be->add_option("--records-max", bench.synth.records_max);
  be->add_option("--clusters", bench.synth.cluster_count);
  be->add_option("--spread", bench.synth.cluster_spread);
  be->add_option("--box-min-x", bench.synth.box_min_x);
  be->add_option("--box-min-y", bench.synth.box_min_y);
  be->add_option("--box-max-x", bench.synth.box_max_x);
  be->add_option("--box-max-y", bench.synth.box_max_y);
  be->add_option("--engines", bench.engines, "engines to sweep")
      ->delimiter(',');
  be->add_option("--m-list", bench.m_list, "owner counts")->delimiter(',');
  be->add_option("--eps-list", bench.eps_list, "query budgets")
      ->delimiter(',');
  be->add_option("--eps-graph", bench.epsilon_graph);
  be->add_option("--graph-strategy", bench.graph_strategy);
  be->add_option("--r", bench.r);
  be->add_option("--r-l", bench.r_l);
  be->add_option("--r-u", bench.r_u);
  be->add_option("--grouping-algo", bench.grouping_algo);
  be->add_option("--max-group-size", bench.global_limit);
  be->add_option("--trials", bench.trials, "trials per cell");
  be->add_option("--queries", bench.queries, "queries per trial");
  be->add_option("--radius-frac", bench.radius_fraction,
                 "query radius as a fraction of the domain diagonal");
  be->add_option("--grid", bench.cells_per_axis);
  be->add_option("--round-latency-ms", bench.round_latency_ms);
  be->add_option("--mpc-cap", bench.mpc_owner_cap,
                 "skip mpc cells above this owner count");
  be->add_option("--seed", bench.seed, "master seed");
  be->add_option("--out", bench.out, "output csv")->required();
  be->add_flag("--resume", bench.resume, "keep cells from a previous run");
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"desk-scale benchmark for private federated range counting"};
  GenDataOptions gen;
  BuildGraphOptions graph;
  GroupCmdOptions group;
  QueryCmdOptions query;
  BenchCmdOptions bench;
  BuildApp(app, gen, graph, group, query, bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << "error: " << e.what() << "\n";
      return e.get_exit_code();
    }
    return app.exit(e);  // --help and friends
  }

  try {
    if (app.got_subcommand("gen-data")) return CmdGenData(gen, std::cerr);
    if (app.got_subcommand("build-graph")) {
      return CmdBuildGraph(graph, std::cout, std::cerr);
    }
    if (app.got_subcommand("group")) {
      return CmdGroup(group, std::cout, std::cerr);
    }
    if (app.got_subcommand("query")) {
      return CmdQuery(query, std::cout, std::cerr);
    }
    if (app.got_subcommand("bench")) return CmdBench(bench, std::cerr);
    std::cerr << "error: no subcommand given\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fedspatial
