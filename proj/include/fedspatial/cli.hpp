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

#ifndef FEDSPATIAL_CLI_HPP_
#define FEDSPATIAL_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fedspatial/dataio.hpp"

namespace fedspatial {

struct GenDataOptions {
  SyntheticSpec spec;
  std::string out;
  std::string labels_out;  // optional sidecar with cluster labels
};

struct BuildGraphOptions {
  std::string data_path;
  int limit_owners = 0;
  int cells_per_axis = 8;
  std::string strategy = "exact";
  double r = 0.5;
  double r_l = 0.4;
  double r_u = 0.6;
  double epsilon_graph = 0.3;
  double round_latency_ms = 1.0;
  uint64_t seed = 0;
  std::string out;
  bool compare_exact = false;
};

struct GroupCmdOptions {
  std::string graph_path;
  std::string algo = "greedy";  // greedy | exhaustive | bruteforce
  int global_limit = 0;         // 0 = unconstrained
  int clique_cap = 200;
  std::string out;
};

struct QueryCmdOptions {
  std::string data_path;
  int limit_owners = 0;
  int cells_per_axis = 8;
  std::string engine = "plaintext";
  double epsilon = 0.3;
  std::string grouping_path;  // required by the fedgroup engine
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 0.0;
  double round_latency_ms = 1.0;
  uint64_t seed = 0;
};

struct BenchCmdOptions {
  // Dataset: a check-in file, or a synthetic federation when data_path is
  // empty. m values come from m_list either way (limit for file data).
  std::string data_path;
  SyntheticSpec synth;

  std::vector<std::string> engines{"dp", "fedgroup"};
  std::vector<int> m_list{500};
  std::vector<double> eps_list{0.3};

  double epsilon_graph = 0.3;
  std::string graph_strategy = "exact";
  double r = 0.5;
  double r_l = 0.4;
  double r_u = 0.6;
  std::string grouping_algo = "greedy";
  int global_limit = 0;

  int trials = 100;
  int queries = 20;
  double radius_fraction = 0.05;
  int cells_per_axis = 8;
  double round_latency_ms = 1.0;
  int mpc_owner_cap = 5000;

  uint64_t seed = 0;
  std::string out;
  bool resume = false;
};

int CmdGenData(const GenDataOptions& options, std::ostream& err);
int CmdBuildGraph(const BuildGraphOptions& options, std::ostream& out,
                  std::ostream& err);
int CmdGroup(const GroupCmdOptions& options, std::ostream& out,
             std::ostream& err);
int CmdQuery(const QueryCmdOptions& options, std::ostream& out,
             std::ostream& err);
int CmdBench(const BenchCmdOptions& options, std::ostream& err);

// Full front door: parses argv (including --config files), dispatches, and
// maps any failure to a nonzero exit code with a one-line error on stderr.
int RunCli(int argc, const char* const* argv);

}  // namespace fedspatial

#endif  // FEDSPATIAL_CLI_HPP_
