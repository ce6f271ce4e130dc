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

#include "qosar/abstraction.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

#include "format_util.hpp"
#include "qosar/error.hpp"
#include "text_util.hpp"

namespace qosar {

namespace {

std::string level_id(int level, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "L%d.%04zu", level, ordinal + 1);
  return buf;
}

std::vector<const Service*> as_services(
    const std::vector<AbstractService>& level) {
  std::vector<const Service*> out;
  out.reserve(level.size());
  for (const auto& s : level) out.push_back(&s);
  return out;
}

// Sorts the members of every class by id, then the classes by their first
// member's id.
void order_classes(std::vector<std::vector<std::size_t>>& classes,
                   const std::vector<const Service*>& services) {
  auto by_id = [&](std::size_t a, std::size_t b) {
    return services[a]->id < services[b]->id;
  };
  for (auto& c : classes) std::sort(c.begin(), c.end(), by_id);
  std::sort(classes.begin(), classes.end(),
            [&](const auto& a, const auto& b) { return by_id(a[0], b[0]); });
}

// `closure` starts with the seed, whose inputs start the schedule.
QoSVector fused_qos(const std::vector<const Service*>& closure,
                    const QoSRegistry& registry) {
  QoSVector out(registry.size());
  for (std::size_t q = 0; q < registry.size(); ++q) {
    const auto& spec = registry[q];
    if (spec.is_path()) {
      const Schedule s = earliest_finish(closure, closure[0]->inputs, q);
      double worst = 0.0;
      for (double f : s.finish) worst = std::max(worst, f);
      out[q] = worst;
    } else {
      std::vector<double> values;
      for (const Service* m : closure) values.push_back(m->qos[q]);
      out[q] = fold_all(spec.sequential, std::move(values));
    }
  }
  return out;
}

}  // namespace

bool input_equivalent(const Service& a, const Service& b) {
  return a.inputs == b.inputs;
}

bool output_equivalent(const Service& a, const Service& b) {
  return a.outputs == b.outputs;
}

bool equivalent(const Service& a, const Service& b) {
  return input_equivalent(a, b) && output_equivalent(a, b);
}

bool dominates(const Service& a, const Service& b) {
  return is_subset(a.inputs, b.inputs) && is_subset(b.outputs, a.outputs);
}

std::vector<std::vector<std::size_t>> equivalence_partition(
    const std::vector<const Service*>& services) {
  std::map<std::pair<ConceptSet, ConceptSet>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < services.size(); ++i) {
    groups[{services[i]->inputs, services[i]->outputs}].push_back(i);
  }
  std::vector<std::vector<std::size_t>> classes;
  classes.reserve(groups.size());
  for (auto& [key, members] : groups) classes.push_back(std::move(members));
  order_classes(classes, services);
  return classes;
}

std::size_t best_representative(const std::vector<const Service*>& cls,
                                const QoSRegistry& registry,
                                const NormalizationScope& scope) {
  if (cls.empty()) throw ContractError("best_representative: empty class");
  auto smaller_id = [&](std::size_t a, std::size_t b) {
    return cls[a]->id < cls[b]->id;
  };

  std::optional<std::size_t> dominant;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < cls.size() && all; ++j) {
      for (std::size_t q = 0; q < registry.size() && all; ++q) {
        all = registry[q].at_least_as_good(cls[i]->qos[q], cls[j]->qos[q]);
      }
    }
    if (all && (!dominant || smaller_id(i, *dominant))) dominant = i;
  }
  if (dominant) return *dominant;

  std::vector<std::pair<double, double>> ranges(registry.size());
  for (std::size_t q = 0; q < registry.size(); ++q) {
    std::vector<double> values;
    values.reserve(cls.size());
    for (const Service* s : cls) values.push_back(s->qos[q]);
    ranges[q] = scope.range(q, values);
  }
  std::size_t best = 0;
  std::vector<double> best_dev;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    std::vector<double> dev(registry.size());
    for (std::size_t q = 0; q < registry.size(); ++q) {
      dev[q] = deviation(normalize(cls[i]->qos[q], registry[q],
                                   ranges[q].first, ranges[q].second));
    }
    std::sort(dev.begin(), dev.end(), std::greater<>());
    if (i == 0 || dev < best_dev || (dev == best_dev && smaller_id(i, best))) {
      best = i;
      best_dev = std::move(dev);
    }
  }
  return best;
}

std::vector<AbstractService> abstract_level1(
    const std::vector<AbstractService>& level0, const QoSRegistry& registry,
    const NormalizationScope& scope) {
  const auto services = as_services(level0);
  std::vector<AbstractService> out;
  for (const auto& cls : equivalence_partition(services)) {
    std::vector<const Service*> members;
    for (std::size_t m : cls) members.push_back(services[m]);
    const std::size_t rep = cls[best_representative(members, registry, scope)];
    AbstractService a;
    a.id = level_id(1, out.size());
    a.level = 1;
    a.inputs = level0[rep].inputs;
    a.outputs = level0[rep].outputs;
    a.qos = level0[rep].qos;
    a.members = cls;
    std::sort(a.members.begin(), a.members.end());
    a.representative = rep;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<AbstractService> abstract_level2(
    const std::vector<AbstractService>& level1) {
  const std::size_t n = level1.size();
  std::vector<AbstractService> out;
  for (std::size_t g = 0; g < n; ++g) {
    bool undominated = true;
    for (std::size_t h = 0; h < n && undominated; ++h) {
      if (h == g) continue;
      if (equivalent(level1[h], level1[g])) {
        throw ContractError("abstract_level2: equivalent services " +
                            level1[h].id + " and " + level1[g].id);
      }
      undominated = !dominates(level1[h], level1[g]);
    }
    if (!undominated) continue;
    AbstractService a;
    a.id = level_id(2, out.size());
    a.level = 2;
    a.inputs = level1[g].inputs;
    a.outputs = level1[g].outputs;
    a.qos = level1[g].qos;
    for (std::size_t s = 0; s < n; ++s) {
      if (s == g || dominates(level1[g], level1[s])) a.members.push_back(s);
    }
    a.representative = g;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<AbstractService> abstract_level3(
    const std::vector<AbstractService>& level2, const QoSRegistry& registry) {
  const auto services = as_services(level2);
  std::map<ConceptSet, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < level2.size(); ++i) {
    groups[level2[i].inputs].push_back(i);
  }
  std::vector<std::vector<std::size_t>> classes;
  for (auto& [key, members] : groups) classes.push_back(std::move(members));
  order_classes(classes, services);

  std::vector<AbstractService> out;
  for (auto& cls : classes) {
    AbstractService a;
    a.id = level_id(3, out.size());
    a.level = 3;
    a.inputs = level2[cls[0]].inputs;
    std::vector<const QoSVector*> qos;
    for (std::size_t m : cls) {
      insert_all(a.outputs, level2[m].outputs);
      qos.push_back(&level2[m].qos);
    }
    a.qos = parallel_aggregate(registry, qos);
    a.members = std::move(cls);
    std::sort(a.members.begin(), a.members.end());
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

// Fixpoint of activation from the seed, reusing closures already computed
// for services that enter along the way.
std::vector<std::size_t> closure_with_memo(
    const std::vector<AbstractService>& level3, std::size_t seed,
    const std::unordered_map<ConceptId, std::vector<std::size_t>>& consumers,
    std::vector<std::optional<std::vector<std::size_t>>>& memo) {
  const std::size_t n = level3.size();
  std::vector<std::size_t> missing(n);
  for (std::size_t i = 0; i < n; ++i) missing[i] = level3[i].inputs.size();
  std::vector<bool> in(n, false);
  std::unordered_map<ConceptId, bool> have;
  std::vector<std::size_t> pending;
  std::vector<std::size_t> members;

  auto add_concept = [&](ConceptId c) {
    if (!have.emplace(c, true).second) return;
    auto it = consumers.find(c);
    if (it == consumers.end()) return;
    for (std::size_t t : it->second) {
      if (--missing[t] == 0) pending.push_back(t);
    }
  };
  auto enter = [&](std::size_t t) {
    if (in[t]) return false;
    in[t] = true;
    members.push_back(t);
    for (ConceptId c : level3[t].outputs) add_concept(c);
    return true;
  };

  for (ConceptId c : level3[seed].inputs) add_concept(c);
  enter(seed);
  while (!pending.empty()) {
    const std::size_t t = pending.back();
    pending.pop_back();
    if (!enter(t)) continue;
    if (memo[t]) {
      for (std::size_t u : *memo[t]) enter(u);
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::find(members.begin(), members.end(), seed));
  members.insert(members.begin(), seed);
  return members;
}

std::unordered_map<ConceptId, std::vector<std::size_t>> consumer_index(
    const std::vector<AbstractService>& services) {
  std::unordered_map<ConceptId, std::vector<std::size_t>> consumers;
  for (std::size_t i = 0; i < services.size(); ++i) {
    for (ConceptId c : services[i].inputs) consumers[c].push_back(i);
  }
  return consumers;
}

FusionSubgraph make_fusion(const std::vector<AbstractService>& level3,
                           const std::vector<std::size_t>& closure,
                           const QoSRegistry& registry) {
  FusionSubgraph f;
  f.services = closure;
  std::vector<const Service*> nodes;
  ConceptSet outputs;
  for (std::size_t m : closure) {
    nodes.push_back(&level3[m]);
    insert_all(outputs, level3[m].outputs);
  }
  f.schedule = earliest_finish(nodes, level3[closure[0]].inputs,
                               registry.timing_param());
  f.edges = wiring_from(nodes, f.schedule, outputs);
  return f;
}

AbstractService fused_service(const std::vector<AbstractService>& level3,
                              std::size_t seed,
                              const std::vector<std::size_t>& closure,
                              const QoSRegistry& registry) {
  AbstractService a;
  a.id = level_id(4, seed);
  a.level = 4;
  a.inputs = level3[seed].inputs;
  std::vector<const Service*> nodes;
  for (std::size_t m : closure) {
    insert_all(a.outputs, level3[m].outputs);
    nodes.push_back(&level3[m]);
  }
  a.qos = fused_qos(nodes, registry);
  a.members = closure;
  std::sort(a.members.begin(), a.members.end());
  a.representative = seed;
  return a;
}

}  // namespace

std::vector<std::size_t> fusion_closure(
    const std::vector<AbstractService>& level3, std::size_t seed) {
  std::vector<std::optional<std::vector<std::size_t>>> memo(level3.size());
  return closure_with_memo(level3, seed, consumer_index(level3), memo);
}

std::vector<AbstractService> abstract_level4(
    const std::vector<AbstractService>& level3, const QoSRegistry& registry) {
  const auto consumers = consumer_index(level3);
  std::vector<std::optional<std::vector<std::size_t>>> memo(level3.size());
  std::vector<AbstractService> out;
  out.reserve(level3.size());
  for (std::size_t s = 0; s < level3.size(); ++s) {
    if (!memo[s]) memo[s] = closure_with_memo(level3, s, consumers, memo);
    out.push_back(fused_service(level3, s, *memo[s], registry));
  }
  return out;
}

// Hierarchy.

AbstractionHierarchy AbstractionHierarchy::build(
    std::shared_ptr<const Repository> repo, NormalizationScope scope) {
  std::array<std::vector<AbstractService>, 4> upper;
  std::vector<AbstractService> level0;
  level0.reserve(repo->services.size());
  for (const auto& s : repo->services) {
    AbstractService a;
    static_cast<Service&>(a) = s;
    level0.push_back(std::move(a));
  }
  upper[0] = abstract_level1(level0, repo->registry, scope);
  upper[1] = abstract_level2(upper[0]);
  upper[2] = abstract_level3(upper[1], repo->registry);
  upper[3] = abstract_level4(upper[2], repo->registry);

  AbstractionHierarchy h;
  h.repo_ = std::move(repo);
  h.scope_ = std::move(scope);
  h.levels_[0] = std::move(level0);
  for (int k = 1; k <= kTopLevel; ++k) h.levels_[k] = std::move(upper[k - 1]);
  h.build_fusion();
  h.index_ids();
  return h;
}

AbstractionHierarchy AbstractionHierarchy::build(const Repository& repo,
                                                 NormalizationScope scope) {
  return build(std::make_shared<const Repository>(repo), std::move(scope));
}

AbstractionHierarchy AbstractionHierarchy::assemble(
    std::shared_ptr<const Repository> repo, NormalizationScope scope,
    std::array<std::vector<AbstractService>, 4> upper) {
  AbstractionHierarchy h;
  h.repo_ = std::move(repo);
  h.scope_ = std::move(scope);
  for (const auto& s : h.repo_->services) {
    AbstractService a;
    static_cast<Service&>(a) = s;
    h.levels_[0].push_back(std::move(a));
  }
  for (int k = 1; k <= kTopLevel; ++k) h.levels_[k] = std::move(upper[k - 1]);
  if (h.levels_[4].size() != h.levels_[3].size()) {
    throw IntegrityError("level 4 must have one service per level-3 service");
  }
  for (std::size_t i = 0; i < h.levels_[4].size(); ++i) {
    const auto& rep = h.levels_[4][i].representative;
    if (!rep || *rep != i) {
      throw IntegrityError(h.levels_[4][i].id +
                           ": level-4 seed must be the level-3 service at the "
                           "same position");
    }
  }
  h.build_fusion();
  h.index_ids();
  h.check_integrity();
  return h;
}

void AbstractionHierarchy::build_fusion() {
  fusion_.clear();
  fusion_.reserve(levels_[4].size());
  for (std::size_t i = 0; i < levels_[4].size(); ++i) {
    const auto& a = levels_[4][i];
    std::vector<std::size_t> closure = a.members;
    const std::size_t seed = a.representative.value_or(i);
    auto it = std::find(closure.begin(), closure.end(), seed);
    if (it == closure.end() ||
        std::any_of(closure.begin(), closure.end(),
                    [&](std::size_t m) { return m >= levels_[3].size(); })) {
      throw IntegrityError(a.id + ": broken fusion member map");
    }
    closure.erase(it);
    closure.insert(closure.begin(), seed);
    fusion_.push_back(make_fusion(levels_[3], closure, repo_->registry));
  }
}

void AbstractionHierarchy::index_ids() {
  for (int k = 0; k <= kTopLevel; ++k) {
    ids_[k].clear();
    for (std::size_t i = 0; i < levels_[k].size(); ++i) {
      ids_[k].emplace(levels_[k][i].id, i);
    }
  }
}

const std::vector<AbstractService>& AbstractionHierarchy::level(int k) const {
  if (k < 0 || k > kTopLevel) {
    throw ContractError("abstraction level " + std::to_string(k) +
                        " out of range");
  }
  return levels_[k];
}

std::optional<std::size_t> AbstractionHierarchy::find(int k,
                                                      std::string_view id) const {
  level(k);
  auto it = ids_[k].find(std::string(id));
  if (it == ids_[k].end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> AbstractionHierarchy::default_expansion(
    int k, std::size_t i) const {
  const auto& a = service(k, i);
  if (k == 0) return {};
  if (k <= 2) return {a.representative.value()};
  return a.members;
}

std::vector<std::size_t> AbstractionHierarchy::concrete_members(
    int k, std::size_t i) const {
  std::vector<std::size_t> current{i};
  for (int level = k; level > 0; --level) {
    std::vector<std::size_t> next;
    for (std::size_t s : current) {
      const auto& m = service(level, s).members;
      next.insert(next.end(), m.begin(), m.end());
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
  }
  return current;
}

void AbstractionHierarchy::check_integrity() const {
  auto fail = [](const std::string& what) { throw IntegrityError(what); };
  const auto& reg = repo_->registry;
  if (levels_[0].size() != repo_->services.size()) {
    fail("level 0 does not match the repository");
  }
  for (int k = 1; k <= kTopLevel; ++k) {
    const auto& below = levels_[k - 1];
    std::vector<int> uses(below.size(), 0);
    for (std::size_t i = 0; i < levels_[k].size(); ++i) {
      const auto& a = levels_[k][i];
      const std::string who = a.id + " (level " + std::to_string(k) + ")";
      if (a.level != k) fail(who + ": wrong level tag");
      if (a.members.empty()) fail(who + ": no members");
      if (!std::is_sorted(a.members.begin(), a.members.end()) ||
          std::adjacent_find(a.members.begin(), a.members.end()) !=
              a.members.end()) {
        fail(who + ": members not sorted and unique");
      }
      for (std::size_t m : a.members) {
        if (m >= below.size()) fail(who + ": member index out of range");
        ++uses[m];
      }
      const bool needs_rep = k != 3;
      if (needs_rep != a.representative.has_value()) {
        fail(who + ": representative presence mismatch");
      }
      if (a.representative &&
          !std::binary_search(a.members.begin(), a.members.end(),
                              *a.representative)) {
        fail(who + ": representative is not a member");
      }
      switch (k) {
        case 1: {
          const auto& rep = below[*a.representative];
          for (std::size_t m : a.members) {
            if (!equivalent(below[m], a)) fail(who + ": member I/O differs");
          }
          if (rep.qos != a.qos) fail(who + ": QoS is not the representative's");
          break;
        }
        case 2: {
          const auto& rep = below[*a.representative];
          if (!equivalent(rep, a) || rep.qos != a.qos) {
            fail(who + ": does not mirror its dominant member");
          }
          for (std::size_t m : a.members) {
            if (!dominates(rep, below[m])) {
              fail(who + ": member not dominated by the group seed");
            }
          }
          break;
        }
        case 3: {
          ConceptSet outs;
          std::vector<const QoSVector*> qos;
          for (std::size_t m : a.members) {
            if (below[m].inputs != a.inputs) fail(who + ": member inputs differ");
            insert_all(outs, below[m].outputs);
            qos.push_back(&below[m].qos);
          }
          if (outs != a.outputs) fail(who + ": outputs are not the union");
          if (parallel_aggregate(reg, qos) != a.qos) {
            fail(who + ": QoS is not the parallel aggregate");
          }
          break;
        }
        case 4: {
          const std::size_t seed = *a.representative;
          auto closure = fusion_closure(below, seed);
          std::sort(closure.begin(), closure.end());
          if (closure != a.members) fail(who + ": members are not the closure");
          const auto expect =
              fused_service(below, seed, fusion_[i].services, reg);
          if (expect.inputs != a.inputs || expect.outputs != a.outputs) {
            fail(who + ": I/O does not match the fused subgraph");
          }
          if (expect.qos != a.qos) fail(who + ": QoS does not match the fusion");
          break;
        }
      }
    }
    for (std::size_t m = 0; m < below.size(); ++m) {
      if (uses[m] == 0) {
        fail("level " + std::to_string(k - 1) + " service " + below[m].id +
             " is not covered by level " + std::to_string(k));
      }
      if ((k == 1 || k == 3) && uses[m] > 1) {
        fail("level " + std::to_string(k) + " member map is not a partition");
      }
    }
  }
}

// Text export.

std::string export_hierarchy(const AbstractionHierarchy& h) {
  const auto& repo = h.repository();
  std::ostringstream out;
  out << format_repository(repo);
  out << "\n[normalization]\n";
  for (std::size_t q = 0; q < repo.registry.size(); ++q) {
    if (!h.scope().fixed(q)) continue;
    const auto [lo, hi] = *h.scope().extremes[q];
    out << repo.registry[q].name << ' ' << format_number(lo) << ' '
        << format_number(hi) << "\n";
  }
  for (int k = 1; k <= kTopLevel; ++k) {
    out << "\n[level " << k << "]\n";
    const auto& below = h.level(k - 1);
    for (const auto& a : h.level(k)) {
      out << a.id << " | in: " << detail::join_concepts(a.inputs, repo.ontology)
          << " | out: " << detail::join_concepts(a.outputs, repo.ontology)
          << " | qos: ";
      for (std::size_t q = 0; q < a.qos.size(); ++q) {
        if (q > 0) out << ", ";
        out << repo.registry[q].name << '=' << format_number(a.qos[q]);
      }
      out << " | members: ";
      for (std::size_t i = 0; i < a.members.size(); ++i) {
        out << (i == 0 ? "" : ", ") << below[a.members[i]].id;
      }
      if (a.representative) {
        out << " | representative: " << below[*a.representative].id;
      }
      out << "\n";
    }
  }
  return out.str();
}

AbstractionHierarchy import_hierarchy(std::string_view text) {
  const auto all = text::lines(text);
  std::size_t split = all.size();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto line = text::trim(text::strip_comment(all[i]));
    if (line == "[normalization]" || line.rfind("[level", 0) == 0) {
      split = i;
      break;
    }
  }
  std::string head;
  for (std::size_t i = 0; i < split; ++i) {
    head.append(all[i]);
    head.push_back('\n');
  }
  auto repo = std::make_shared<Repository>(parse_repository(head));
  const auto& reg = repo->registry;

  NormalizationScope scope;
  scope.extremes.resize(reg.size());
  std::array<std::vector<AbstractService>, 4> upper;
  std::array<std::unordered_map<std::string, std::size_t>, 5> ids;
  for (std::size_t i = 0; i < repo->services.size(); ++i) {
    ids[0].emplace(repo->services[i].id, i);
  }

  int section = 0;  // -1 normalization, k > 0 level k
  int next_level = 1;
  for (std::size_t i = split; i < all.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = text::trim(text::strip_comment(all[i]));
    if (line.empty()) continue;
    if (line.front() == '[') {
      int k = 0;
      if (line == "[normalization]" && section == 0) {
        section = -1;
      } else if (std::sscanf(std::string(line).c_str(), "[level %d]", &k) == 1 &&
                 k == next_level) {
        section = k;
        ++next_level;
      } else {
        throw ParseError(line_no, "unexpected section " + std::string(line));
      }
      continue;
    }
    if (section == 0) throw ParseError(line_no, "record outside of any section");
    if (section == -1) {
      const auto tok = text::split_ws(line);
      if (tok.size() != 3) throw ParseError(line_no, "expected 'name min max'");
      const auto q = reg.find(tok[0]);
      const auto lo = parse_number(tok[1]);
      const auto hi = parse_number(tok[2]);
      if (!q) throw ParseError(line_no, "unknown QoS parameter '" + tok[0] + "'");
      if (!lo || !hi || *lo > *hi) throw ParseError(line_no, "bad extremes");
      scope.extremes[*q] = std::make_pair(*lo, *hi);
      continue;
    }
    const int k = section;
    const auto fields = text::split(line, '|');
    AbstractService a;
    a.level = k;
    a.id = std::string(text::trim(fields[0]));
    if (!is_valid_identifier(a.id)) {
      throw ParseError(line_no, "invalid service id '" + a.id + "'");
    }
    bool have_in = false, have_out = false, have_qos = false, have_m = false;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto field = text::trim(fields[f]);
      const auto colon = field.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "field without key");
      }
      const auto key = text::trim(field.substr(0, colon));
      const auto value = field.substr(colon + 1);
      auto member_index = [&](const std::string& id) {
        auto it = ids[k - 1].find(id);
        if (it == ids[k - 1].end()) {
          throw IntegrityError("line " + std::to_string(line_no) +
                               ": unknown level-" + std::to_string(k - 1) +
                               " service '" + id + "'");
        }
        return it->second;
      };
      try {
        if (key == "in" && !have_in) {
          a.inputs = repo->ontology.resolve_all(detail::parse_name_list(value));
          have_in = true;
        } else if (key == "out" && !have_out) {
          a.outputs =
              repo->ontology.resolve_all(detail::parse_name_list(value));
          have_out = true;
        } else if (key == "qos" && !have_qos) {
          a.qos = detail::parse_qos_values(value, reg, line_no);
          have_qos = true;
        } else if (key == "members" && !have_m) {
          for (const auto& id : detail::parse_name_list(value)) {
            a.members.push_back(member_index(id));
          }
          std::sort(a.members.begin(), a.members.end());
          have_m = true;
        } else if (key == "representative" && !a.representative) {
          a.representative = member_index(std::string(text::trim(value)));
        } else {
          throw ParseError(line_no, "unexpected field '" + std::string(key) + "'");
        }
      } catch (const ResolutionError& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": " +
                              e.what());
      }
    }
    if (!have_in || !have_out || !have_qos || !have_m) {
      throw ParseError(line_no, "abstract service needs in, out, qos, members");
    }
    if (!ids[k].emplace(a.id, upper[k - 1].size()).second) {
      throw ParseError(line_no, "duplicate id '" + a.id + "'");
    }
    upper[k - 1].push_back(std::move(a));
  }
  return AbstractionHierarchy::assemble(std::move(repo), std::move(scope),
                                        std::move(upper));
}

}  // namespace qosar
