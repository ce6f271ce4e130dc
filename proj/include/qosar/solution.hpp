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

#ifndef QOSAR_SOLUTION_HPP_
#define QOSAR_SOLUTION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qosar/concept_set.hpp"
#include "qosar/qos.hpp"
#include "qosar/repository.hpp"

namespace qosar {

// Virtual endpoints used in wiring and graph edges.
inline constexpr int kSource = -1;
inline constexpr int kSink = -2;

struct WiringEdge {
  int from = kSource;
  int to = kSink;
  ConceptSet concepts;

  bool operator==(const WiringEdge& o) const {
    return from == o.from && to == o.to && concepts == o.concepts;
  }
};

// Earliest-finish execution of a set of services. Concepts in `initial` are
// available at time 0; a service starts once all its inputs are available and
// runs for its value of the duration parameter (0 without one). The first
// service to deliver a concept becomes its provider; ties go to the lower
// node index, so the provider relation is always acyclic.
struct Schedule {
  std::vector<bool> scheduled;
  std::vector<double> start;
  std::vector<double> finish;
  std::vector<std::size_t> order;  // scheduled nodes, in completion order
  std::unordered_map<ConceptId, double> time;
  std::unordered_map<ConceptId, int> provider;  // kSource for initial concepts

  bool available(ConceptId c) const { return time.count(c) != 0; }
};

Schedule earliest_finish(const std::vector<const Service*>& nodes,
                         const ConceptSet& initial,
                         std::optional<std::size_t> duration_param);

// Wiring of `nodes` under the schedule: one edge per (provider, consumer)
// pair carrying the concepts the consumer takes from it, plus edges into
// kSink for `sink`.
std::vector<WiringEdge> wiring_from(const std::vector<const Service*>& nodes,
                                    const Schedule& schedule,
                                    const ConceptSet& sink);

struct SolutionNode {
  std::size_t service = 0;  // index into the layer of the solution's level
  Service data;             // effective I/O and QoS of the node
  // Previous-level services the node expands to on reconstruction.
  std::vector<std::size_t> expansion;
};

struct Solution {
  int level = 0;
  ConceptSet source;  // query inputs
  ConceptSet sink;    // query outputs
  std::vector<SolutionNode> nodes;
  std::vector<WiringEdge> wiring;
  QoSVector qos;
  bool feasible = false;

  std::vector<std::string> ids() const;
};

// Recomputes the wiring, orders nodes topologically, sets `feasible` and the
// aggregated QoS. Nodes that can never start are kept at the end and make
// the solution infeasible.
void wire(Solution& solution, const QoSRegistry& registry);

// Path parameters: longest source-to-sink path over the wiring, summing node
// values. Every other parameter folds over all nodes.
QoSVector aggregate_qos(const Solution& solution, const QoSRegistry& registry);

// Structural problems of a solution; empty means valid.
std::vector<std::string> check_solution(const Solution& solution);

std::string format_solution(const Solution& solution, const Ontology& ontology,
                            const QoSRegistry& registry,
                            const Constraints& constraints = {});

std::string format_qos(const QoSVector& qos, const QoSRegistry& registry);

}  // namespace qosar

#endif  // QOSAR_SOLUTION_HPP_
