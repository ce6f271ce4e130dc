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

#ifndef QOSAR_GRAPH_HPP_
#define QOSAR_GRAPH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "qosar/abstraction.hpp"
#include "qosar/repository.hpp"
#include "qosar/solution.hpp"

namespace qosar {

// Query-specific activation graph over one abstraction level. Nodes are
// ordered by activation wave, then by service index; edges (producer ->
// consumer, labelled with the concepts carried) always go from an earlier
// wave to a later one, with kSource / kSink as virtual endpoints.
struct DependencyGraph {
  const AbstractionHierarchy* hierarchy = nullptr;
  int level = 0;
  ConceptSet source;
  ConceptSet sink;
  std::vector<std::size_t> nodes;  // service indices at `level`
  std::vector<int> wave;           // first activation wave, 1-based
  std::vector<WiringEdge> edges;   // endpoints are node positions
  bool feasible = false;
  // Level 4 only: nodes dropped as sub-services of retained nodes.
  std::vector<std::size_t> eliminated;

  std::size_t nsd() const { return nodes.size(); }
  const AbstractService& service(std::size_t pos) const {
    return hierarchy->service(level, nodes[pos]);
  }
};

struct GraphOptions {
  bool eliminate_subservices = true;  // level 4 only
};

// Forward chaining from the query inputs to a fixpoint, then backward
// pruning of nodes that cannot contribute to the query outputs. An
// unreachable output yields a graph flagged infeasible, not an error.
DependencyGraph build_graph(const AbstractionHierarchy& h, int level,
                            const Query& query, const GraphOptions& options = {});

// Level-4 services a, b: members(a) strictly inside members(b), or equal
// members with a listed after b.
bool is_subservice(const AbstractionHierarchy& h, std::size_t a, std::size_t b);

// Drops level-4 nodes covered by a retained super-service, as long as the
// remaining nodes still activate each other and cover the query outputs.
DependencyGraph eliminate_subservices(const DependencyGraph& graph);

// Forward chaining restricted to `services`: true when every one of them
// becomes active and `sink` is covered.
bool chains_fully(const std::vector<const Service*>& services,
                  const ConceptSet& source, const ConceptSet& sink);

std::string dump_graph(const DependencyGraph& graph);

}  // namespace qosar

#endif  // QOSAR_GRAPH_HPP_
