// Copyright 2026 The qosar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QOSAR_COMPOSE_HPP_
#define QOSAR_COMPOSE_HPP_

#include <cstddef>
#include <vector>

#include "qosar/graph.hpp"
#include "qosar/qos.hpp"
#include "qosar/solution.hpp"

namespace qosar {

struct ComposeResult {
  bool found = false;  // false only when the graph admits no solution
  Solution solution;
  bool satisfied = false;  // every bound holds
  std::vector<std::size_t> violated;
  bool exact = true;       // optimality is guaranteed (optimal_single)
  bool truncated = false;  // the search hit its expansion cap
  std::size_t expansions = 0;
};

// Solution made of the graph nodes at `positions`, wired and aggregated.
Solution solution_from_nodes(const DependencyGraph& graph,
                             std::vector<std::size_t> positions);

// Optimizes one parameter. Path parameters use an earliest-finish sweep with
// backward extraction; min/max parameters a bottleneck threshold search;
// both are exact. Sum, count and product parameters use a greedy additive
// cover followed by redundancy removal, reported with exact = false.
ComposeResult optimal_single(const DependencyGraph& graph, std::size_t param);

struct SearchOptions {
  std::size_t max_expansions = 200000;
};

// First solution meeting every bound, found by trying a few greedy
// extractions and then a best-first search over partial solutions. Without a
// satisfying solution the least-violating one seen is returned together with
// its violated parameters.
ComposeResult constrained_multi(const DependencyGraph& graph,
                                const Constraints& bounds,
                                const SearchOptions& options = {});

struct Enumeration {
  std::vector<Solution> solutions;
  bool truncated = false;
};

// Every minimal feasible node set, ordered by size and then by node
// position. Stops after `cap` candidate sets and flags truncation.
Enumeration all_feasible(const DependencyGraph& graph, std::size_t cap = 10000);

}  // namespace qosar

#endif  // QOSAR_COMPOSE_HPP_
