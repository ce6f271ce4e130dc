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

#include "qosar/solution.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "qosar/error.hpp"

namespace qosar {

Schedule earliest_finish(const std::vector<const Service*>& nodes,
                         const ConceptSet& initial,
                         std::optional<std::size_t> duration_param) {
  const std::size_t n = nodes.size();
  Schedule s;
  s.scheduled.assign(n, false);
  s.start.assign(n, 0.0);
  s.finish.assign(n, 0.0);

  std::unordered_map<ConceptId, std::vector<std::size_t>> consumers;
  std::vector<std::size_t> missing(n);
  for (std::size_t i = 0; i < n; ++i) {
    missing[i] = nodes[i]->inputs.size();
    for (ConceptId c : nodes[i]->inputs) consumers[c].push_back(i);
  }

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  auto enqueue = [&](std::size_t i) {
    double st = 0.0;
    for (ConceptId c : nodes[i]->inputs) st = std::max(st, s.time.at(c));
    s.start[i] = st;
    s.finish[i] =
        st + (duration_param ? nodes[i]->qos[*duration_param] : 0.0);
    ready.push({s.finish[i], i});
  };
  auto deliver = [&](ConceptId c, double t, int provider) {
    s.time.emplace(c, t);
    s.provider.emplace(c, provider);
    auto it = consumers.find(c);
    if (it == consumers.end()) return;
    for (std::size_t i : it->second) {
      if (--missing[i] == 0) enqueue(i);
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (missing[i] == 0) enqueue(i);
  }
  for (ConceptId c : initial) deliver(c, 0.0, kSource);
  while (!ready.empty()) {
    const auto [f, i] = ready.top();
    ready.pop();
    if (s.scheduled[i]) continue;
    s.scheduled[i] = true;
    s.order.push_back(i);
    for (ConceptId c : nodes[i]->outputs) {
      if (!s.available(c)) deliver(c, f, static_cast<int>(i));
    }
  }
  return s;
}

std::vector<WiringEdge> wiring_from(const std::vector<const Service*>& nodes,
                                    const Schedule& schedule,
                                    const ConceptSet& sink) {
  std::vector<WiringEdge> edges;
  auto emit = [&](int to, const ConceptSet& needs) {
    std::map<int, ConceptSet> by_provider;
    for (ConceptId c : needs) {
      auto it = schedule.provider.find(c);
      if (it != schedule.provider.end()) by_provider[it->second].push_back(c);
    }
    for (auto& [from, cs] : by_provider) {
      edges.push_back({from, to, std::move(cs)});
    }
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (schedule.scheduled[i]) emit(static_cast<int>(i), nodes[i]->inputs);
  }
  emit(kSink, sink);
  return edges;
}

std::vector<std::string> Solution::ids() const {
  std::vector<std::string> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.data.id);
  return out;
}

void wire(Solution& solution, const QoSRegistry& registry) {
  std::vector<const Service*> ptrs;
  ptrs.reserve(solution.nodes.size());
  for (const auto& n : solution.nodes) ptrs.push_back(&n.data);
  const Schedule sched =
      earliest_finish(ptrs, solution.source, registry.timing_param());
  const auto raw = wiring_from(ptrs, sched, solution.sink);

  // Completion order is a topological order of the wiring.
  std::vector<std::size_t> perm = sched.order;
  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    if (!sched.scheduled[i]) perm.push_back(i);
  }
  std::vector<int> pos(ptrs.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    pos[perm[k]] = static_cast<int>(k);
  }
  std::vector<SolutionNode> reordered;
  reordered.reserve(perm.size());
  for (std::size_t k : perm) reordered.push_back(std::move(solution.nodes[k]));
  solution.nodes = std::move(reordered);

  solution.wiring.clear();
  for (const auto& e : raw) {
    solution.wiring.push_back({e.from < 0 ? e.from : pos[e.from],
                               e.to < 0 ? e.to : pos[e.to], e.concepts});
  }
  std::sort(solution.wiring.begin(), solution.wiring.end(),
            [](const WiringEdge& a, const WiringEdge& b) {
              const int ta = a.to == kSink ? 1 << 30 : a.to;
              const int tb = b.to == kSink ? 1 << 30 : b.to;
              return std::tie(ta, a.from) < std::tie(tb, b.from);
            });

  bool ok = sched.order.size() == ptrs.size();
  for (ConceptId c : solution.sink) ok = ok && sched.available(c);
  solution.feasible = ok;
  solution.qos = aggregate_qos(solution, registry);
}

QoSVector aggregate_qos(const Solution& solution, const QoSRegistry& registry) {
  const std::size_t n = solution.nodes.size();
  std::vector<std::vector<int>> preds(n);
  std::vector<int> sink_from;
  for (const auto& e : solution.wiring) {
    if (e.to == kSink) {
      sink_from.push_back(e.from);
    } else if (e.to >= 0 && static_cast<std::size_t>(e.to) < n) {
      preds[e.to].push_back(e.from);
    }
  }
  QoSVector out(registry.size());
  for (std::size_t q = 0; q < registry.size(); ++q) {
    const auto& spec = registry[q];
    if (!spec.is_path()) {
      std::vector<double> values;
      for (const auto& node : solution.nodes) values.push_back(node.data.qos[q]);
      out[q] = fold_all(spec.sequential, std::move(values));
      continue;
    }
    std::vector<double> finish(n, 0.0);
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::function<double(int)> visit = [&](int v) -> double {
      if (v < 0) return 0.0;
      if (state[v] == 2) return finish[v];
      if (state[v] == 1) throw ContractError("aggregate_qos: cyclic wiring");
      state[v] = 1;
      double st = 0.0;
      for (int p : preds[v]) st = std::max(st, visit(p));
      finish[v] = st + solution.nodes[v].data.qos[q];
      state[v] = 2;
      return finish[v];
    };
    double best = 0.0;
    for (int f : sink_from) best = std::max(best, visit(f));
    out[q] = best;
  }
  return out;
}

std::vector<std::string> check_solution(const Solution& solution) {
  std::vector<std::string> problems;
  const int n = static_cast<int>(solution.nodes.size());
  std::vector<ConceptSet> received(n);
  ConceptSet at_sink;
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  auto name = [&](int v) {
    if (v == kSource) return std::string("source");
    if (v == kSink) return std::string("sink");
    return solution.nodes[v].data.id;
  };
  for (const auto& e : solution.wiring) {
    const bool from_ok = e.from == kSource || (e.from >= 0 && e.from < n);
    const bool to_ok = e.to == kSink || (e.to >= 0 && e.to < n);
    if (!from_ok || !to_ok || e.from == e.to) {
      problems.push_back("edge with invalid endpoints");
      continue;
    }
    if (e.concepts.empty()) {
      problems.push_back("empty edge " + name(e.from) + " -> " + name(e.to));
    }
    const ConceptSet& offered = e.from == kSource
                                    ? solution.source
                                    : solution.nodes[e.from].data.outputs;
    if (!is_subset(e.concepts, offered)) {
      problems.push_back("edge " + name(e.from) + " -> " + name(e.to) +
                         " carries concepts its producer does not offer");
    }
    if (e.to == kSink) {
      if (!is_subset(e.concepts, solution.sink)) {
        problems.push_back("edge into sink carries concepts not requested");
      }
      insert_all(at_sink, e.concepts);
    } else {
      if (!is_subset(e.concepts, solution.nodes[e.to].data.inputs)) {
        problems.push_back("edge " + name(e.from) + " -> " + name(e.to) +
                           " carries concepts the consumer does not take");
      }
      insert_all(received[e.to], e.concepts);
      if (e.from >= 0) {
        succ[e.from].push_back(e.to);
        ++indeg[e.to];
      }
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!is_subset(solution.nodes[v].data.inputs, received[v])) {
      problems.push_back("inputs of " + name(v) + " are not all wired");
    }
  }
  if (!is_subset(solution.sink, at_sink)) {
    problems.push_back("query outputs are not all delivered");
  }
  std::vector<int> stack;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) stack.push_back(v);
  }
  int seen = 0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int w : succ[v]) {
      if (--indeg[w] == 0) stack.push_back(w);
    }
  }
  if (seen != n) problems.push_back("wiring contains a cycle");
  return problems;
}

std::string format_qos(const QoSVector& qos, const QoSRegistry& registry) {
  std::string out;
  for (std::size_t q = 0; q < qos.size() && q < registry.size(); ++q) {
    if (q > 0) out += ", ";
    out += registry[q].name + "=" + format_number(qos[q]);
  }
  return out;
}

std::string format_solution(const Solution& solution, const Ontology& ontology,
                            const QoSRegistry& registry,
                            const Constraints& constraints) {
  std::ostringstream out;
  auto name = [&](int v) {
    if (v == kSource) return std::string("source");
    if (v == kSink) return std::string("sink");
    return solution.nodes[v].data.id;
  };
  out << "level " << solution.level << "\n";
  out << "feasible " << (solution.feasible ? "yes" : "no") << "\n";
  for (const auto& n : solution.nodes) out << "node " << n.data.id << "\n";
  for (const auto& e : solution.wiring) {
    out << "wire " << name(e.from) << " -> " << name(e.to) << " :";
    for (std::size_t i = 0; i < e.concepts.size(); ++i) {
      out << (i == 0 ? " " : ", ") << ontology.name(e.concepts[i]);
    }
    out << "\n";
  }
  out << "qos " << format_qos(solution.qos, registry) << "\n";
  if (!constraints.empty()) {
    const auto bad = violated_params(registry, solution.qos, constraints);
    out << "violated";
    if (bad.empty()) out << " none";
    for (std::size_t i = 0; i < bad.size(); ++i) {
      out << (i == 0 ? " " : ", ") << registry[bad[i]].name;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qosar
