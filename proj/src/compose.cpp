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

#include "qosar/compose.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>

#include "qosar/error.hpp"

namespace qosar {

namespace {

using Positions = std::vector<std::size_t>;

std::vector<const Service*> services_at(const DependencyGraph& g,
                                        const Positions& positions) {
  std::vector<const Service*> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(&g.service(p));
  return out;
}

Positions all_positions(const DependencyGraph& g) {
  Positions out(g.nodes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

// Activated subset of `positions` and whether it covers the sink.
std::pair<Positions, bool> activated(const DependencyGraph& g,
                                     const Positions& positions) {
  const auto ptrs = services_at(g, positions);
  const Schedule s = earliest_finish(ptrs, g.source, std::nullopt);
  Positions act;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (s.scheduled[i]) act.push_back(positions[i]);
  }
  const bool covers = std::all_of(g.sink.begin(), g.sink.end(),
                                  [&](ConceptId c) { return s.available(c); });
  return {act, covers};
}

// Backward extraction from the providers of an earliest-finish schedule
// over `allowed`; nullopt when the sink is not covered.
std::optional<Positions> extract_fastest(const DependencyGraph& g,
                                         const Positions& allowed,
                                         std::optional<std::size_t> duration) {
  const auto ptrs = services_at(g, allowed);
  const Schedule s = earliest_finish(ptrs, g.source, duration);
  for (ConceptId c : g.sink) {
    if (!s.available(c)) return std::nullopt;
  }
  std::vector<bool> chosen(allowed.size(), false);
  std::vector<ConceptId> stack(g.sink.begin(), g.sink.end());
  while (!stack.empty()) {
    const ConceptId c = stack.back();
    stack.pop_back();
    const int prov = s.provider.at(c);
    if (prov == kSource || chosen[prov]) continue;
    chosen[prov] = true;
    for (ConceptId x : ptrs[prov]->inputs) stack.push_back(x);
  }
  Positions out;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    if (chosen[i]) out.push_back(allowed[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Positions bottleneck_extract(const DependencyGraph& g, std::size_t q) {
  const auto& reg = g.hierarchy->registry();
  const auto& spec = reg[q];
  std::vector<double> values;
  for (std::size_t p = 0; p < g.nodes.size(); ++p) {
    values.push_back(g.service(p).qos[q]);
  }
  std::sort(values.begin(), values.end(), [&](double a, double b) {
    return spec.strictly_better(a, b);
  });
  values.erase(std::unique(values.begin(), values.end()), values.end());
  auto allowed_at = [&](double t) {
    Positions out;
    for (std::size_t p = 0; p < g.nodes.size(); ++p) {
      if (spec.at_least_as_good(g.service(p).qos[q], t)) out.push_back(p);
    }
    return out;
  };
  std::size_t lo = 0;
  std::size_t hi = values.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (activated(g, allowed_at(values[mid])).second) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return extract_fastest(g, allowed_at(values[lo]), reg.timing_param())
      .value();
}

double fold_weight(const QoSParamSpec& spec, double v) {
  return spec.sequential == Aggregation::kProduct ? -std::log(v) : v;
}

// Drops nodes, heaviest first, while the remainder still covers the sink.
Positions prune_redundant(const DependencyGraph& g, Positions positions,
                          const std::function<double(std::size_t)>& weight) {
  bool changed = true;
  while (changed) {
    changed = false;
    Positions order = positions;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double wa = weight(a), wb = weight(b);
      return wa != wb ? wa > wb : a > b;
    });
    for (std::size_t x : order) {
      Positions rest;
      for (std::size_t p : positions) {
        if (p != x) rest.push_back(p);
      }
      auto [act, covers] = activated(g, rest);
      if (covers) {
        positions = std::move(act);
        changed = true;
        break;
      }
    }
  }
  return positions;
}

// Greedy additive cover: each concept is bought from the producer with the
// cheapest accumulated cost of itself plus its inputs.
Positions greedy_extract(const DependencyGraph& g, std::size_t q) {
  const auto& spec = g.hierarchy->registry()[q];
  auto weight = [&](std::size_t p) {
    return fold_weight(spec, g.service(p).qos[q]);
  };
  std::unordered_map<ConceptId, double> cost;
  std::unordered_map<ConceptId, std::size_t> best;
  for (ConceptId c : g.source) cost[c] = 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t p = 0; p < g.nodes.size(); ++p) {
      const auto& s = g.service(p);
      double total = weight(p);
      bool ready = true;
      for (ConceptId c : s.inputs) {
        auto it = cost.find(c);
        if (it == cost.end()) {
          ready = false;
          break;
        }
        total += it->second;
      }
      if (!ready) continue;
      for (ConceptId c : s.outputs) {
        if (contains(g.source, c)) continue;
        auto it = cost.find(c);
        if (it == cost.end() ||
            total < it->second - 1e-12 * std::max(1.0, std::fabs(total))) {
          cost[c] = total;
          best[c] = p;
          changed = true;
        }
      }
    }
  }
  std::set<std::size_t> chosen;
  std::vector<ConceptId> stack(g.sink.begin(), g.sink.end());
  std::set<ConceptId> seen;
  while (!stack.empty()) {
    const ConceptId c = stack.back();
    stack.pop_back();
    if (contains(g.source, c) || !seen.insert(c).second) continue;
    auto it = best.find(c);
    if (it == best.end()) continue;
    if (chosen.insert(it->second).second) {
      for (ConceptId x : g.service(it->second).inputs) stack.push_back(x);
    }
  }
  auto [act, covers] = activated(g, Positions(chosen.begin(), chosen.end()));
  if (!covers) {
    act = extract_fastest(g, all_positions(g),
                          g.hierarchy->registry().timing_param())
              .value();
  }
  return prune_redundant(g, std::move(act), weight);
}

struct Ranked {
  Solution solution;
  Positions positions;
  std::vector<std::size_t> violated;
  double max_gap = 0.0;

  auto key() const {
    return std::make_tuple(violated.size(), max_gap, positions.size());
  }
  bool better_than(const Ranked& o) const {
    if (key() != o.key()) return key() < o.key();
    return positions < o.positions;
  }
};

Ranked rank(const DependencyGraph& g, Positions positions,
            const Constraints& bounds) {
  const auto& reg = g.hierarchy->registry();
  Ranked r;
  r.solution = solution_from_nodes(g, positions);
  r.positions = std::move(positions);
  r.violated = violated_params(reg, r.solution.qos, bounds);
  for (std::size_t q : r.violated) {
    r.max_gap = std::max(
        r.max_gap, normalized_violation(reg[q], r.solution.qos[q], bounds.at(q)));
  }
  return r;
}

ComposeResult finish(Ranked r, bool satisfied) {
  ComposeResult out;
  out.found = true;
  out.solution = std::move(r.solution);
  out.satisfied = satisfied;
  out.violated = std::move(r.violated);
  return out;
}

}  // namespace

Solution solution_from_nodes(const DependencyGraph& graph,
                             std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()),
                  positions.end());
  const auto& h = *graph.hierarchy;
  Solution s;
  s.level = graph.level;
  s.source = graph.source;
  s.sink = graph.sink;
  for (std::size_t p : positions) {
    SolutionNode n;
    n.service = graph.nodes.at(p);
    n.data = static_cast<const Service&>(graph.service(p));
    n.expansion = h.default_expansion(graph.level, n.service);
    s.nodes.push_back(std::move(n));
  }
  wire(s, h.registry());
  return s;
}

ComposeResult optimal_single(const DependencyGraph& graph, std::size_t param) {
  ComposeResult r;
  if (!graph.feasible) return r;
  const auto& reg = graph.hierarchy->registry();
  if (param >= reg.size()) throw ContractError("optimal_single: bad parameter");
  const auto& spec = reg[param];
  Positions chosen;
  if (spec.is_path()) {
    chosen = extract_fastest(graph, all_positions(graph), param).value();
    r.exact = reg.timing_param() == param;
  } else if (spec.sequential == Aggregation::kMin ||
             spec.sequential == Aggregation::kMax) {
    chosen = bottleneck_extract(graph, param);
  } else {
    chosen = greedy_extract(graph, param);
    r.exact = false;
  }
  r.found = true;
  r.satisfied = true;
  r.solution = solution_from_nodes(graph, std::move(chosen));
  return r;
}

ComposeResult constrained_multi(const DependencyGraph& graph,
                                const Constraints& bounds,
                                const SearchOptions& options) {
  if (!graph.feasible) return {};
  const auto& reg = graph.hierarchy->registry();
  const auto timing = reg.timing_param();

  std::vector<std::size_t> bounded_fold;
  std::vector<std::size_t> bounded_path;
  for (const auto& [q, bound] : bounds) {
    (reg[q].is_path() ? bounded_path : bounded_fold).push_back(q);
  }

  std::vector<Positions> seeds;
  seeds.push_back(extract_fastest(graph, all_positions(graph), timing).value());
  for (std::size_t q : bounded_fold) {
    const auto agg = reg[q].sequential;
    seeds.push_back(agg == Aggregation::kMin || agg == Aggregation::kMax
                        ? bottleneck_extract(graph, q)
                        : greedy_extract(graph, q));
  }
  std::optional<Ranked> best;
  auto consider = [&](Ranked r) {
    if (!best || r.better_than(*best)) best = std::move(r);
  };
  for (auto& seed : seeds) {
    Ranked r = rank(graph, std::move(seed), bounds);
    if (r.violated.empty()) return finish(std::move(r), true);
    consider(std::move(r));
  }

  // Best-first search over node sets grown in activation order.
  const bool times_matter =
      bounded_path.size() == 1 && timing && bounded_path[0] == *timing;
  const bool dominance =
      bounded_path.empty() || (bounded_path.size() == 1 && times_matter);

  struct State {
    Positions chosen;
    ConceptSet available;
    std::vector<double> fold;
    std::vector<double> times;  // aligned with `available`
    std::size_t missing = 0;
    double penalty = 0.0;
  };
  std::vector<State> states;
  auto make_state = [&](Positions chosen) {
    State st;
    st.chosen = std::move(chosen);
    const auto ptrs = services_at(graph, st.chosen);
    const Schedule sched = earliest_finish(ptrs, graph.source, timing);
    st.available = graph.source;
    for (const Service* s : ptrs) insert_all(st.available, s->outputs);
    if (times_matter) {
      st.times.reserve(st.available.size());
      for (ConceptId c : st.available) st.times.push_back(sched.time.at(c));
    }
    for (std::size_t q : bounded_fold) {
      std::vector<double> values;
      for (const Service* s : ptrs) values.push_back(s->qos[q]);
      const double acc = fold_all(reg[q].sequential, std::move(values));
      st.fold.push_back(acc);
      st.penalty += normalized_violation(reg[q], acc, bounds.at(q));
    }
    double latest = 0.0;
    for (ConceptId c : graph.sink) {
      if (!contains(st.available, c)) {
        ++st.missing;
      } else if (times_matter) {
        latest = std::max(latest, sched.time.at(c));
      }
    }
    if (times_matter) {
      st.penalty +=
          normalized_violation(reg[*timing], latest, bounds.at(*timing));
    }
    return st;
  };
  auto fold_ok = [&](const State& st) {
    for (std::size_t k = 0; k < bounded_fold.size(); ++k) {
      const std::size_t q = bounded_fold[k];
      if (!satisfies(reg[q], st.fold[k], bounds.at(q))) return false;
    }
    return true;
  };
  auto dominated_by = [&](const State& a, const State& b) {
    for (std::size_t k = 0; k < bounded_fold.size(); ++k) {
      if (!reg[bounded_fold[k]].at_least_as_good(b.fold[k], a.fold[k])) {
        return false;
      }
    }
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      if (b.times[i] > a.times[i]) return false;
    }
    return true;
  };
  // Priority: fewest missing outputs, smallest penalty, fewest nodes, then
  // the lexicographically smallest node set.
  auto worse = [&](std::size_t a, std::size_t b) {
    const State& x = states[a];
    const State& y = states[b];
    const auto nx = x.chosen.size();
    const auto ny = y.chosen.size();
    return std::tie(x.missing, x.penalty, nx, x.chosen) >
           std::tie(y.missing, y.penalty, ny, y.chosen);
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      decltype(worse)>
      open(worse);
  std::set<Positions> visited;
  std::map<ConceptSet, std::vector<std::size_t>> frontier;

  states.push_back(make_state({}));
  visited.insert({});
  open.push(0);

  ComposeResult out;
  std::size_t expansions = 0;
  bool truncated = false;
  while (!open.empty()) {
    if (expansions >= options.max_expansions) {
      truncated = true;
      break;
    }
    const std::size_t idx = open.top();
    open.pop();
    if (states[idx].missing == 0) {
      Ranked r = rank(graph, states[idx].chosen, bounds);
      if (r.violated.empty()) {
        out = finish(std::move(r), true);
        out.expansions = expansions;
        return out;
      }
      const bool path_violated =
          std::any_of(r.violated.begin(), r.violated.end(),
                      [&](std::size_t q) { return reg[q].is_path(); });
      consider(std::move(r));
      if (!path_violated) continue;
    }
    ++expansions;
    for (std::size_t v = 0; v < graph.nodes.size(); ++v) {
      const State& cur = states[idx];
      if (std::binary_search(cur.chosen.begin(), cur.chosen.end(), v)) continue;
      const auto& s = graph.service(v);
      if (!is_subset(s.inputs, cur.available) ||
          is_subset(s.outputs, cur.available)) {
        continue;
      }
      Positions next = cur.chosen;
      next.insert(std::upper_bound(next.begin(), next.end(), v), v);
      if (!visited.insert(next).second) continue;
      State child = make_state(std::move(next));
      if (!fold_ok(child)) continue;
      if (dominance) {
        auto& bucket = frontier[child.available];
        const bool beaten = std::any_of(
            bucket.begin(), bucket.end(),
            [&](std::size_t o) { return dominated_by(child, states[o]); });
        if (beaten) continue;
        bucket.push_back(states.size());
      }
      states.push_back(std::move(child));
      open.push(states.size() - 1);
    }
  }
  out = finish(std::move(*best), false);
  out.truncated = truncated;
  out.expansions = expansions;
  return out;
}

Enumeration all_feasible(const DependencyGraph& graph, std::size_t cap) {
  Enumeration out;
  if (!graph.feasible) return out;
  std::unordered_map<ConceptId, Positions> producers;
  for (std::size_t p = 0; p < graph.nodes.size(); ++p) {
    for (ConceptId c : graph.service(p).outputs) producers[c].push_back(p);
  }
  std::set<Positions> found;
  std::vector<bool> chosen(graph.nodes.size(), false);
  std::unordered_map<ConceptId, int> produced;
  const std::size_t step_cap = cap * 100 + 1000;
  std::size_t steps = 0;
  bool stop = false;

  std::function<void(const ConceptSet&)> branch = [&](const ConceptSet& needs) {
    if (stop) return;
    if (++steps > step_cap) {
      out.truncated = stop = true;
      return;
    }
    std::optional<ConceptId> unmet;
    for (ConceptId c : needs) {
      if (!contains(graph.source, c) && produced[c] == 0) {
        unmet = c;
        break;
      }
    }
    if (!unmet) {
      Positions set;
      for (std::size_t p = 0; p < chosen.size(); ++p) {
        if (chosen[p]) set.push_back(p);
      }
      if (chains_fully(services_at(graph, set), graph.source, graph.sink)) {
        found.insert(std::move(set));
        if (found.size() >= cap) out.truncated = stop = true;
      }
      return;
    }
    for (std::size_t p : producers[*unmet]) {
      const auto& s = graph.service(p);
      chosen[p] = true;
      for (ConceptId c : s.outputs) ++produced[c];
      branch(set_union(needs, s.inputs));
      for (ConceptId c : s.outputs) --produced[c];
      chosen[p] = false;
      if (stop) return;
    }
  };
  branch(graph.sink);

  std::vector<Positions> minimal;
  for (const auto& set : found) {
    const bool has_subset = std::any_of(
        found.begin(), found.end(), [&](const Positions& other) {
          return other.size() < set.size() &&
                 std::includes(set.begin(), set.end(), other.begin(),
                               other.end());
        });
    if (!has_subset) minimal.push_back(set);
  }
  std::sort(minimal.begin(), minimal.end(),
            [](const Positions& a, const Positions& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  for (auto& set : minimal) {
    out.solutions.push_back(solution_from_nodes(graph, std::move(set)));
  }
  return out;
}

}  // namespace qosar
