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

#include "qosar/graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "qosar/error.hpp"

namespace qosar {

namespace {

constexpr int kNever = 0;

struct Waves {
  std::vector<int> wave;  // per pool position; kNever if not activated
  std::unordered_map<ConceptId, int> concept_wave;
};

// Breadth-first forward chaining over `pool`: wave w holds the services
// whose last input first became available in wave w - 1 (source = wave 0).
Waves chain_waves(const std::vector<const Service*>& pool,
                  const ConceptSet& source) {
  Waves w;
  w.wave.assign(pool.size(), kNever);
  std::unordered_map<ConceptId, std::vector<std::size_t>> consumers;
  std::vector<std::size_t> missing(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    missing[i] = pool[i]->inputs.size();
    for (ConceptId c : pool[i]->inputs) consumers[c].push_back(i);
  }
  std::vector<std::size_t> ready;
  auto make_available = [&](ConceptId c, int at) {
    if (!w.concept_wave.emplace(c, at).second) return;
    auto it = consumers.find(c);
    if (it == consumers.end()) return;
    for (std::size_t t : it->second) {
      if (--missing[t] == 0) ready.push_back(t);
    }
  };
  for (ConceptId c : source) make_available(c, 0);
  for (int current = 1; !ready.empty(); ++current) {
    std::vector<std::size_t> batch;
    batch.swap(ready);
    for (std::size_t s : batch) w.wave[s] = current;
    for (std::size_t s : batch) {
      for (ConceptId c : pool[s]->outputs) make_available(c, current);
    }
  }
  return w;
}

// Layers, prunes and wires the services `pool` (indices at `level`).
DependencyGraph assemble(const AbstractionHierarchy& h, int level,
                         const std::vector<std::size_t>& pool,
                         const ConceptSet& source, const ConceptSet& sink) {
  const auto& services = h.level(level);
  std::vector<const Service*> ptrs;
  ptrs.reserve(pool.size());
  for (std::size_t i : pool) ptrs.push_back(&services[i]);
  const Waves w = chain_waves(ptrs, source);

  DependencyGraph g;
  g.hierarchy = &h;
  g.level = level;
  g.source = source;
  g.sink = sink;
  g.feasible = std::all_of(sink.begin(), sink.end(), [&](ConceptId c) {
    return w.concept_wave.count(c) != 0;
  });

  std::vector<std::size_t> active;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    if (w.wave[p] != kNever) active.push_back(p);
  }
  std::sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(w.wave[b], pool[b]) < std::tie(w.wave[a], pool[a]);
  });
  std::unordered_map<ConceptId, int> need;
  for (ConceptId c : sink) need[c] = std::numeric_limits<int>::max();
  std::vector<std::size_t> kept;
  for (std::size_t p : active) {
    bool relevant = false;
    for (ConceptId c : ptrs[p]->outputs) {
      if (contains(source, c)) continue;
      auto it = need.find(c);
      if (it != need.end() && it->second > w.wave[p]) {
        relevant = true;
        break;
      }
    }
    if (!relevant) continue;
    kept.push_back(p);
    for (ConceptId c : ptrs[p]->inputs) {
      int& n = need[c];
      n = std::max(n, w.wave[p]);
    }
  }
  std::reverse(kept.begin(), kept.end());
  for (std::size_t p : kept) {
    g.nodes.push_back(pool[p]);
    g.wave.push_back(w.wave[p]);
  }

  std::unordered_map<ConceptId, std::vector<int>> producers;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    for (ConceptId c : services[g.nodes[v]].outputs) {
      producers[c].push_back(static_cast<int>(v));
    }
  }
  auto wire_into = [&](int to, const ConceptSet& needs, int limit_wave) {
    std::map<int, ConceptSet> by_from;
    for (ConceptId c : needs) {
      if (contains(source, c)) by_from[kSource].push_back(c);
      auto it = producers.find(c);
      if (it == producers.end()) continue;
      for (int p : it->second) {
        if (g.wave[p] < limit_wave) by_from[p].push_back(c);
      }
    }
    for (auto& [from, cs] : by_from) g.edges.push_back({from, to, std::move(cs)});
  };
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    wire_into(static_cast<int>(v), services[g.nodes[v]].inputs, g.wave[v]);
  }
  wire_into(kSink, sink, std::numeric_limits<int>::max());
  return g;
}

}  // namespace

bool chains_fully(const std::vector<const Service*>& services,
                  const ConceptSet& source, const ConceptSet& sink) {
  const Waves w = chain_waves(services, source);
  for (int x : w.wave) {
    if (x == kNever) return false;
  }
  return std::all_of(sink.begin(), sink.end(), [&](ConceptId c) {
    return w.concept_wave.count(c) != 0;
  });
}

bool is_subservice(const AbstractionHierarchy& h, std::size_t a,
                   std::size_t b) {
  if (a == b) return false;
  const auto& ma = h.service(kTopLevel, a).members;
  const auto& mb = h.service(kTopLevel, b).members;
  if (ma == mb) return a > b;
  return ma.size() < mb.size() &&
         std::includes(mb.begin(), mb.end(), ma.begin(), ma.end());
}

DependencyGraph eliminate_subservices(const DependencyGraph& graph) {
  if (graph.level != kTopLevel) {
    throw ContractError("eliminate_subservices: graph is not at level 4");
  }
  const auto& h = *graph.hierarchy;
  std::vector<std::size_t> retained = graph.nodes;
  std::vector<std::size_t> order = retained;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = h.service(kTopLevel, a).members.size();
    const auto sb = h.service(kTopLevel, b).members.size();
    return sa != sb ? sa < sb : a > b;
  });
  std::vector<std::size_t> eliminated = graph.eliminated;
  for (std::size_t x : order) {
    const bool covered = std::any_of(
        retained.begin(), retained.end(),
        [&](std::size_t y) { return is_subservice(h, x, y); });
    if (!covered) continue;
    std::vector<std::size_t> others;
    std::vector<const Service*> ptrs;
    for (std::size_t y : retained) {
      if (y == x) continue;
      others.push_back(y);
      ptrs.push_back(&h.service(kTopLevel, y));
    }
    if (!chains_fully(ptrs, graph.source, graph.sink)) continue;
    retained = std::move(others);
    eliminated.push_back(x);
  }
  std::sort(retained.begin(), retained.end());
  DependencyGraph out =
      assemble(h, kTopLevel, retained, graph.source, graph.sink);
  std::sort(eliminated.begin(), eliminated.end());
  out.eliminated = std::move(eliminated);
  return out;
}

DependencyGraph build_graph(const AbstractionHierarchy& h, int level,
                            const Query& query, const GraphOptions& options) {
  std::vector<std::size_t> all(h.size(level));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  DependencyGraph g = assemble(h, level, all, query.inputs, query.outputs);
  if (level == kTopLevel && options.eliminate_subservices && g.feasible) {
    g = eliminate_subservices(g);
  }
  return g;
}

std::string dump_graph(const DependencyGraph& graph) {
  const auto& h = *graph.hierarchy;
  const auto& onto = h.repository().ontology;
  std::ostringstream out;
  auto name = [&](int v) {
    if (v == kSource) return std::string("source");
    if (v == kSink) return std::string("sink");
    return graph.service(v).id;
  };
  out << "level " << graph.level << "\n";
  out << "feasible " << (graph.feasible ? "yes" : "no") << "\n";
  out << "nodes " << graph.nsd() << "\n";
  for (std::size_t v = 0; v < graph.nodes.size(); ++v) {
    out << "node " << graph.service(v).id << " wave " << graph.wave[v]
        << " members " << graph.service(v).members.size() << " concrete "
        << h.concrete_members(graph.level, graph.nodes[v]).size() << "\n";
  }
  for (std::size_t e : graph.eliminated) {
    out << "eliminated " << h.service(graph.level, e).id << "\n";
  }
  for (const auto& e : graph.edges) {
    out << "edge " << name(e.from) << " -> " << name(e.to) << " :";
    for (std::size_t i = 0; i < e.concepts.size(); ++i) {
      out << (i == 0 ? " " : ", ") << onto.name(e.concepts[i]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace qosar
