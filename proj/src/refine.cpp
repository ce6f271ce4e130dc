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

#include "qosar/refine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qosar/error.hpp"

namespace qosar {

double laxity(const QoSParamSpec& spec, double bound, double achieved) {
  if (!satisfies(spec, achieved, bound)) {
    throw ContractError("laxity: bound on " + spec.name + " is violated");
  }
  if (spec.laxity == LaxityKind::kMultiplicative) {
    const double eps = bound / achieved;
    return spec.positive() ? std::min(eps, 1.0) : std::max(eps, 1.0);
  }
  return std::max(0.0, spec.positive() ? achieved - bound : bound - achieved);
}

double violation_gap(const QoSParamSpec& spec, double bound, double achieved) {
  if (satisfies(spec, achieved, bound)) {
    throw ContractError("violation_gap: bound on " + spec.name + " holds");
  }
  if (spec.laxity == LaxityKind::kMultiplicative) return achieved / bound;
  return std::fabs(achieved - bound);
}

double relax(const QoSParamSpec& spec, double value, double eps) {
  if (spec.laxity == LaxityKind::kMultiplicative) return value * eps;
  return spec.positive() ? value - eps : value + eps;
}

RefinementContext RefinementContext::of(const QoSRegistry& registry,
                                        const QoSVector& qos,
                                        const Constraints& bounds) {
  RefinementContext ctx;
  ctx.bounds = bounds;
  for (const auto& [q, bound] : bounds) {
    if (satisfies(registry[q], qos[q], bound)) {
      ctx.satisfied.push_back(q);
      ctx.laxities[q] = laxity(registry[q], bound, qos[q]);
    } else {
      ctx.violated.push_back(q);
      ctx.gaps[q] = violation_gap(registry[q], bound, qos[q]);
    }
  }
  return ctx;
}

double gain(const QoSRegistry& registry, const NormalizationScope& scope,
            const std::vector<const Service*>& cls, const QoSVector& candidate,
            const QoSVector& incumbent,
            const std::vector<std::size_t>& violated) {
  double total = 0.0;
  for (std::size_t q : violated) {
    std::vector<double> values;
    for (const Service* s : cls) values.push_back(s->qos[q]);
    values.push_back(candidate[q]);
    values.push_back(incumbent[q]);
    const auto [lo, hi] = scope.range(q, values);
    total += normalize(candidate[q], registry[q], lo, hi) -
             normalize(incumbent[q], registry[q], lo, hi);
  }
  return total;
}

std::optional<std::size_t> update_qos(
    const QoSRegistry& registry, const NormalizationScope& scope,
    const std::vector<const Service*>& members, std::size_t incumbent,
    const RefinementContext& context,
    const std::function<bool(const Service&)>& admissible) {
  const QoSVector& inc = members.at(incumbent)->qos;
  std::optional<std::size_t> best;
  double best_gain = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i == incumbent) continue;
    const Service& cand = *members[i];
    bool ok = true;
    for (std::size_t q : context.satisfied) {
      const double limit = relax(registry[q], inc[q], context.laxities.at(q));
      ok = ok && registry[q].at_least_as_good(cand.qos[q], limit);
    }
    for (std::size_t q : context.violated) {
      ok = ok && registry[q].at_least_as_good(cand.qos[q], inc[q]);
    }
    if (!ok || (admissible && !admissible(cand))) continue;
    const double g =
        gain(registry, scope, members, cand.qos, inc, context.violated);
    if (g <= 0.0) continue;
    if (!best || g > best_gain ||
        (g == best_gain && cand.id < members[*best]->id)) {
      best = i;
      best_gain = g;
    }
  }
  return best;
}

std::string to_text(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  auto render = [&](const std::map<std::string, double>& m) {
    std::string s;
    for (const auto& [name, v] : m) {
      if (!s.empty()) s += ", ";
      s += name + "=" + format_number(v);
    }
    return s.empty() ? std::string("-") : s;
  };
  for (const auto& e : trace) {
    out << "level " << e.level << " node " << e.node << " " << e.action;
    if (!e.chosen.empty()) out << " " << e.chosen;
    out << " | laxity before: " << render(e.laxity_before)
        << " | after: " << render(e.laxity_after) << "\n";
  }
  return out.str();
}

namespace {

std::map<std::string, double> named(const QoSRegistry& reg,
                                    const RefinementContext& ctx) {
  std::map<std::string, double> out;
  for (const auto& [q, v] : ctx.laxities) out[reg[q].name] = v;
  return out;
}

ConceptSet outgoing(const Solution& s, std::size_t pos) {
  ConceptSet out;
  for (const auto& e : s.wiring) {
    if (e.from == static_cast<int>(pos)) insert_all(out, e.concepts);
  }
  return out;
}

// QoS of running `members` as one fused block started from `inputs`.
QoSVector block_qos(const QoSRegistry& reg,
                    const std::vector<const Service*>& members,
                    const ConceptSet& inputs) {
  QoSVector out(reg.size());
  for (std::size_t q = 0; q < reg.size(); ++q) {
    if (reg[q].is_path()) {
      const Schedule s = earliest_finish(members, inputs, q);
      double worst = 0.0;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (s.scheduled[i]) worst = std::max(worst, s.finish[i]);
      }
      out[q] = worst;
    } else {
      std::vector<double> values;
      for (const Service* m : members) values.push_back(m->qos[q]);
      out[q] = fold_all(reg[q].sequential, std::move(values));
    }
  }
  return out;
}

// Accepts a step only if it keeps every satisfied bound and does not worsen
// any violated parameter at the solution level.
bool acceptable(const QoSRegistry& reg, const RefinementContext& before,
                const QoSVector& old_qos, const Solution& candidate) {
  if (!candidate.feasible) return false;
  for (std::size_t q : before.satisfied) {
    if (!satisfies(reg[q], candidate.qos[q], before.bounds.at(q))) return false;
  }
  for (std::size_t q : before.violated) {
    if (!reg[q].at_least_as_good(candidate.qos[q], old_qos[q])) return false;
  }
  return true;
}

std::vector<std::string> ids_of(const AbstractionHierarchy& h, int level,
                                const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(h.service(level, i).id);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

// Applies the level-specific step to the node at `pos`; returns false when
// the step leaves the node unchanged.
bool refine_node(const AbstractionHierarchy& h, Solution& s, std::size_t pos,
                 const RefinementContext& ctx, TraceEntry& entry) {
  const auto& reg = h.registry();
  const int k = s.level;
  SolutionNode& node = s.nodes[pos];
  const auto& abstract = h.service(k, node.service);
  const auto& below = h.level(k - 1);

  if (k == 1 || k == 2) {
    std::vector<const Service*> members;
    for (std::size_t m : abstract.members) members.push_back(&below[m]);
    const auto it = std::find(abstract.members.begin(), abstract.members.end(),
                              node.expansion.at(0));
    if (it == abstract.members.end()) {
      throw IntegrityError(abstract.id + ": expansion is not a member");
    }
    const std::size_t incumbent = it - abstract.members.begin();
    std::function<bool(const Service&)> admissible;
    ConceptSet before_pos = s.source;
    for (std::size_t i = 0; i < pos; ++i) {
      insert_all(before_pos, s.nodes[i].data.outputs);
    }
    const ConceptSet sent = outgoing(s, pos);
    if (k == 2) {
      admissible = [&](const Service& cand) {
        return is_subset(cand.inputs, before_pos) &&
               is_subset(sent, cand.outputs);
      };
    }
    const auto choice =
        update_qos(reg, h.scope(), members, incumbent, ctx, admissible);
    if (!choice) return false;
    const std::size_t m = abstract.members[*choice];
    if (k == 1) {
      node.data.qos = below[m].qos;
    } else {
      node.data = static_cast<const Service&>(below[m]);
      node.data.id = abstract.id;
    }
    node.expansion = {m};
    entry.action = "swap";
    entry.chosen = below[m].id;
    return true;
  }

  const ConceptSet needed = outgoing(s, pos);
  std::vector<std::size_t> kept;
  if (k == 3) {
    // Drop the worst members first while the rest still covers `needed`.
    std::vector<std::size_t> order = node.expansion;
    std::vector<const Service*> cls;
    for (std::size_t m : abstract.members) cls.push_back(&below[m]);
    auto badness = [&](std::size_t m) {
      double b = 0.0;
      for (std::size_t q : ctx.violated) {
        std::vector<double> values;
        for (const Service* c : cls) values.push_back(c->qos[q]);
        const auto [lo, hi] = h.scope().range(q, values);
        b += deviation(normalize(below[m].qos[q], reg[q], lo, hi));
      }
      return b;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ba = badness(a), bb = badness(b);
      return ba != bb ? ba > bb : a > b;
    });
    kept = node.expansion;
    for (std::size_t m : order) {
      ConceptSet covered;
      for (std::size_t x : kept) {
        if (x != m) insert_all(covered, below[x].outputs);
      }
      if (is_subset(needed, covered)) {
        kept.erase(std::find(kept.begin(), kept.end(), m));
      }
    }
  } else {
    std::vector<const Service*> ptrs;
    for (std::size_t m : node.expansion) ptrs.push_back(&below[m]);
    const Schedule sched = earliest_finish(ptrs, node.data.inputs,
                                           reg.timing_param());
    std::vector<bool> keep(ptrs.size(), false);
    std::vector<ConceptId> stack(needed.begin(), needed.end());
    while (!stack.empty()) {
      const ConceptId c = stack.back();
      stack.pop_back();
      auto it = sched.provider.find(c);
      if (it == sched.provider.end()) return false;
      if (it->second == kSource || keep[it->second]) continue;
      keep[it->second] = true;
      for (ConceptId x : ptrs[it->second]->inputs) stack.push_back(x);
    }
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      if (keep[i]) kept.push_back(node.expansion[i]);
    }
  }
  std::sort(kept.begin(), kept.end());
  std::vector<std::size_t> current = node.expansion;
  std::sort(current.begin(), current.end());
  if (kept == current) return false;
  if (kept.empty()) {
    entry.action = "remove";
    s.nodes.erase(s.nodes.begin() + pos);
    return true;
  }
  std::vector<const Service*> members;
  ConceptSet outputs;
  for (std::size_t m : kept) {
    members.push_back(&below[m]);
    insert_all(outputs, below[m].outputs);
  }
  if (k == 3) {
    std::vector<const QoSVector*> qos;
    for (const Service* m : members) qos.push_back(&m->qos);
    node.data.qos = parallel_aggregate(reg, qos);
  } else {
    node.data.qos = block_qos(reg, members, node.data.inputs);
  }
  node.data.outputs = outputs;
  node.expansion = kept;
  entry.action = "drop";
  entry.chosen = join(ids_of(h, k - 1, kept));
  return true;
}

}  // namespace

RefineResult refine_qos(const AbstractionHierarchy& h, const Solution& solution,
                        const Constraints& bounds) {
  const auto& reg = h.registry();
  RefineResult r;
  r.refined = solution;
  RefinementContext ctx = RefinementContext::of(reg, solution.qos, bounds);
  const int k = solution.level;
  if (k > 0 && !ctx.all_satisfied()) {
    std::vector<std::size_t> order;
    for (const auto& n : solution.nodes) {
      if (h.service(k, n.service).members.size() > 1) order.push_back(n.service);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ma = h.service(k, a).members.size();
      const auto mb = h.service(k, b).members.size();
      return ma != mb ? ma > mb : a < b;
    });
    for (std::size_t svc : order) {
      auto it = std::find_if(r.refined.nodes.begin(), r.refined.nodes.end(),
                             [&](const SolutionNode& n) { return n.service == svc; });
      if (it == r.refined.nodes.end()) continue;
      TraceEntry entry;
      entry.level = k;
      entry.node = h.service(k, svc).id;
      entry.laxity_before = named(reg, ctx);
      Solution candidate = r.refined;
      const std::size_t pos = it - r.refined.nodes.begin();
      if (!refine_node(h, candidate, pos, ctx, entry)) {
        entry.action = "skip";
        entry.laxity_after = entry.laxity_before;
        r.trace.push_back(std::move(entry));
        continue;
      }
      wire(candidate, reg);
      if (!acceptable(reg, ctx, r.refined.qos, candidate)) {
        entry.action = "reject";
        entry.laxity_after = entry.laxity_before;
        r.trace.push_back(std::move(entry));
        continue;
      }
      r.refined = std::move(candidate);
      ctx = RefinementContext::of(reg, r.refined.qos, bounds);
      entry.laxity_after = named(reg, ctx);
      r.trace.push_back(std::move(entry));
      if (ctx.all_satisfied()) break;
    }
  }
  r.success = ctx.all_satisfied();
  if (r.success && k > 0) {
    r.expressed = express_one_level_down(h, r.refined);
    r.success = satisfies_all(reg, r.expressed.qos, bounds);
  } else if (r.success) {
    r.expressed = r.refined;
  }
  return r;
}

Solution express_one_level_down(const AbstractionHierarchy& h,
                                const Solution& solution) {
  if (solution.level == 0) return solution;
  const int below = solution.level - 1;
  Solution out;
  out.level = below;
  out.source = solution.source;
  out.sink = solution.sink;
  std::vector<bool> seen(h.size(below), false);
  for (const auto& n : solution.nodes) {
    if (n.expansion.empty()) {
      throw IntegrityError("node " + n.data.id + " has no expansion");
    }
    for (std::size_t e : n.expansion) {
      if (e >= h.size(below)) {
        throw IntegrityError("node " + n.data.id +
                             " expands to a missing service");
      }
      if (seen[e]) continue;
      seen[e] = true;
      SolutionNode m;
      m.service = e;
      m.data = static_cast<const Service&>(h.service(below, e));
      m.expansion = h.default_expansion(below, e);
      out.nodes.push_back(std::move(m));
    }
  }
  wire(out, h.registry());
  return out;
}

Solution reconstruct(const AbstractionHierarchy& h, const Solution& solution) {
  Solution s = solution;
  while (s.level > 0) s = express_one_level_down(h, s);
  return s;
}

CompleteRefinement complete_refinement(const AbstractionHierarchy& h, int level,
                                       const Query& query,
                                       const SearchOptions& search) {
  CompleteRefinement out;
  for (int l = level - 1; l >= 0; --l) {
    const DependencyGraph g = build_graph(h, l, query);
    out.level = l;
    out.feasible = g.feasible;
    if (!g.feasible) return out;
    const ComposeResult r = constrained_multi(g, query.constraints, search);
    out.truncated = out.truncated || r.truncated;
    out.solution = r.solution;
    out.concrete = reconstruct(h, r.solution);
    if (r.satisfied &&
        satisfies_all(h.registry(), out.concrete.qos, query.constraints)) {
      out.satisfied = true;
      return out;
    }
  }
  return out;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kSatisfied:
      return "satisfied";
    case Status::kUnsatisfiable:
      return "unsatisfiable";
    case Status::kInfeasible:
      return "infeasible";
  }
  return "?";
}

Outcome orchestrate(const AbstractionHierarchy& h, const Query& query,
                    const OrchestrateOptions& options) {
  const auto& reg = h.registry();
  const auto& bounds = query.constraints;
  Outcome out;
  int level = options.start_level;
  DependencyGraph built;
  const DependencyGraph* graph = options.start_graph;
  if (!graph) {
    built = build_graph(h, level, query);
    graph = &built;
  }
  auto answer = [&](const Solution& abstract, Status status) {
    out.status = status;
    out.answered = abstract;
    out.answered_level = abstract.level;
    out.concrete = reconstruct(h, abstract);
    out.violated = violated_params(reg, out.concrete.qos, bounds);
    return out;
  };
  for (;;) {
    if (!graph->feasible) {
      out.status = Status::kInfeasible;
      return out;
    }
    if (bounds.empty()) {
      const ComposeResult r = options.objective
                                  ? optimal_single(*graph, *options.objective)
                                  : constrained_multi(*graph, {}, options.search);
      return answer(r.solution, Status::kSatisfied);
    }
    const ComposeResult r = constrained_multi(*graph, bounds, options.search);
    out.truncated = out.truncated || r.truncated;
    if (r.satisfied) {
      const Solution concrete = reconstruct(h, r.solution);
      if (satisfies_all(reg, concrete.qos, bounds)) {
        return answer(r.solution, Status::kSatisfied);
      }
    }
    if (level == 0 ||
        (reg.size() == 1 && level == 1 && !r.truncated)) {
      return answer(r.solution, Status::kUnsatisfiable);
    }
    const bool headroom = std::any_of(
        r.solution.nodes.begin(), r.solution.nodes.end(),
        [&](const SolutionNode& n) {
          return h.service(level, n.service).members.size() > 1;
        });
    if (headroom) {
      ++out.qos_refinement_passes;
      RefineResult ref = refine_qos(h, r.solution, bounds);
      out.trace.insert(out.trace.end(), ref.trace.begin(), ref.trace.end());
      if (ref.success) {
        const Solution concrete = reconstruct(h, ref.expressed);
        if (satisfies_all(reg, concrete.qos, bounds)) {
          answer(ref.expressed, Status::kSatisfied);
          out.answered = std::move(ref.refined);
          out.answered_level = level;
          return out;
        }
      }
    }
    ++out.complete_refinements;
    --level;
    built = build_graph(h, level, query);
    graph = &built;
  }
}

}  // namespace qosar
