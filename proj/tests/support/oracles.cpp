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

#include "oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace qosar::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_all(const ConceptSet& have, const ConceptSet& need) {
  for (ConceptId c : need) {
    if (std::find(have.begin(), have.end(), c) == have.end()) return false;
  }
  return true;
}

}  // namespace

ConceptSet forward_closure(const std::vector<const Service*>& services,
                           const ConceptSet& inputs) {
  ConceptSet have = inputs;
  std::vector<bool> fired(services.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < services.size(); ++i) {
      if (fired[i] || !has_all(have, services[i]->inputs)) continue;
      fired[i] = true;
      changed = true;
      for (ConceptId c : services[i]->outputs) {
        if (std::find(have.begin(), have.end(), c) == have.end()) {
          have.push_back(c);
        }
      }
    }
  }
  std::sort(have.begin(), have.end());
  return have;
}

bool reachable(const std::vector<const Service*>& services, const Query& q) {
  return has_all(forward_closure(services, q.inputs), q.outputs);
}

Evaluation evaluate(const QoSRegistry& reg,
                    const std::vector<const Service*>& subset,
                    const ConceptSet& source, const ConceptSet& sink) {
  Evaluation ev;
  ev.qos.assign(reg.size(), 0.0);

  std::map<ConceptId, double> avail;
  for (ConceptId c : source) avail[c] = 0.0;
  const auto timing = reg.timing_param();
  auto at = [&](ConceptId c) {
    auto it = avail.find(c);
    return it == avail.end() ? kInf : it->second;
  };
  // Relaxation until no concept time improves; durations are non-negative
  // so this settles after at most |subset| rounds of improvement.
  std::vector<double> finish(subset.size(), kInf);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      double start = 0.0;
      for (ConceptId c : subset[i]->inputs) start = std::max(start, at(c));
      if (start == kInf) continue;
      const double f = start + (timing ? subset[i]->qos[*timing] : 0.0);
      if (f < finish[i]) {
        finish[i] = f;
        changed = true;
      }
      for (ConceptId c : subset[i]->outputs) {
        if (f < at(c)) {
          avail[c] = f;
          changed = true;
        }
      }
    }
  }
  ev.feasible = std::all_of(finish.begin(), finish.end(),
                            [](double f) { return f < kInf; });
  double latest = 0.0;
  for (ConceptId c : sink) {
    if (at(c) == kInf) ev.feasible = false;
    latest = std::max(latest, at(c));
  }
  if (!ev.feasible) return ev;

  for (std::size_t q = 0; q < reg.size(); ++q) {
    const auto& spec = reg[q];
    if (spec.sequential == Aggregation::kSum &&
        spec.parallel == Aggregation::kMax) {
      if (!timing || q != *timing) {
        throw std::invalid_argument("evaluate: one time-like parameter only");
      }
      ev.qos[q] = latest;
      continue;
    }
    // Ascending order keeps the result independent of how the subset is
    // listed; rounding would otherwise differ between equal multisets.
    std::vector<double> values;
    for (auto* s : subset) values.push_back(s->qos[q]);
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    switch (spec.sequential) {
      case Aggregation::kSum:
        for (double x : values) acc += x;
        break;
      case Aggregation::kCount:
        acc = static_cast<double>(subset.size());
        break;
      case Aggregation::kProduct:
        acc = 1.0;
        for (double x : values) acc *= x;
        break;
      case Aggregation::kMin:
        acc = values.empty() ? kInf : values.front();
        break;
      case Aggregation::kMax:
        acc = values.empty() ? -kInf : values.back();
        break;
    }
    ev.qos[q] = acc;
  }
  return ev;
}

SubsetSearch::SubsetSearch(const QoSRegistry& reg,
                           std::vector<const Service*> services,
                           const ConceptSet& source, const ConceptSet& sink)
    : reg_(reg), source_(source), sink_(sink) {
  const ConceptSet reach = forward_closure(services, source);
  for (auto* s : services) {
    if (has_all(reach, s->inputs)) services_.push_back(s);
  }
  if (services_.size() > 20) {
    throw std::invalid_argument("SubsetSearch: too many services");
  }
}

template <class Visit>
void SubsetSearch::for_each_feasible(Visit&& visit) const {
  const std::uint32_t n = static_cast<std::uint32_t>(services_.size());
  std::vector<const Service*> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(services_[i]);
    }
    Evaluation ev = evaluate(reg_, subset, source_, sink_);
    if (ev.feasible && !visit(mask, subset, ev)) return;
  }
}

std::optional<double> SubsetSearch::optimum(std::size_t param) const {
  std::optional<double> best;
  const auto& spec = reg_[param];
  for_each_feasible([&](std::uint32_t, const auto&, const Evaluation& ev) {
    const double v = ev.qos[param];
    if (!best || (spec.positive() ? v > *best : v < *best)) best = v;
    return true;
  });
  return best;
}

std::optional<std::vector<const Service*>> SubsetSearch::satisfying(
    const Constraints& bounds) const {
  std::optional<std::vector<const Service*>> found;
  for_each_feasible([&](std::uint32_t, const auto& subset,
                        const Evaluation& ev) {
    for (const auto& [q, b] : bounds) {
      if (!satisfies(reg_[q], ev.qos[q], b)) return true;
    }
    found = subset;
    return false;
  });
  return found;
}

bool SubsetSearch::any_feasible() const {
  bool any = false;
  for_each_feasible([&](std::uint32_t, const auto&, const Evaluation&) {
    any = true;
    return false;
  });
  return any;
}

std::vector<QoSVector> SubsetSearch::feasible_qos() const {
  std::vector<QoSVector> out;
  for_each_feasible([&](std::uint32_t, const auto&, const Evaluation& ev) {
    out.push_back(ev.qos);
    return true;
  });
  return out;
}

std::vector<std::vector<std::string>> SubsetSearch::minimal_feasible() const {
  std::vector<std::uint32_t> feasible;
  for_each_feasible([&](std::uint32_t mask, const auto&, const Evaluation&) {
    feasible.push_back(mask);
    return true;
  });
  std::vector<std::vector<std::string>> out;
  for (std::uint32_t m : feasible) {
    const bool minimal = std::none_of(
        feasible.begin(), feasible.end(),
        [&](std::uint32_t o) { return o != m && (o & m) == o; });
    if (!minimal) continue;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < services_.size(); ++i) {
      if (m & (1u << i)) ids.push_back(services_[i]->id);
    }
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> io_classes(
    const std::vector<const Service*>& services) {
  std::map<std::pair<ConceptSet, ConceptSet>, std::vector<std::size_t>> by_io;
  for (std::size_t i = 0; i < services.size(); ++i) {
    by_io[{services[i]->inputs, services[i]->outputs}].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [key, members] : by_io) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

bool qos_dominates(const QoSRegistry& reg, const QoSVector& a,
                   const QoSVector& b) {
  bool strictly = false;
  for (std::size_t q = 0; q < reg.size(); ++q) {
    const bool pos = reg[q].monotonicity == Monotonicity::kPositive;
    const bool better = pos ? a[q] > b[q] : a[q] < b[q];
    const bool worse = pos ? a[q] < b[q] : a[q] > b[q];
    if (worse) return false;
    strictly = strictly || better;
  }
  return strictly;
}

std::vector<std::size_t> pareto_front(const QoSRegistry& reg,
                                      const std::vector<QoSVector>& vectors) {
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < vectors.size() && !dominated; ++j) {
      dominated = j != i && qos_dominates(reg, vectors[j], vectors[i]);
    }
    if (!dominated) front.push_back(i);
  }
  return front;
}

}  // namespace qosar::oracle
