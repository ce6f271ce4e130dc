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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "instances.hpp"
#include "oracles.hpp"
#include "qosar/compose.hpp"
#include "qosar/generator.hpp"

using namespace qosar;
using qosar::testing::pointers;

namespace {

std::vector<std::string> sorted_ids(const Solution& s) {
  auto ids = s.ids();
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<const Service*> services_of(const Solution& s) {
  std::vector<const Service*> out;
  for (const auto& n : s.nodes) out.push_back(&n.data);
  return out;
}

std::size_t position_of(const DependencyGraph& g, const std::string& id) {
  for (std::size_t p = 0; p < g.nsd(); ++p) {
    if (g.service(p).id == id) return p;
  }
  FAIL("no node " << id);
  return 0;
}

// The solution checks out structurally and its QoS matches an independent
// evaluation of the same service set.
void check_against_oracle(const QoSRegistry& reg, const Solution& s,
                          const Query& q) {
  CHECK(check_solution(s).empty());
  CHECK(s.feasible);
  const auto ev = oracle::evaluate(reg, services_of(s), q.inputs, q.outputs);
  CHECK(ev.feasible);
  CHECK(ev.qos == s.qos);
}

}  // namespace

TEST_CASE("example 4 alternatives at level 0") {
  const auto fx = example_fixture(4);
  const auto h = AbstractionHierarchy::build(fx.repository, fx.scope);
  const auto g = build_graph(h, 0, fx.query);
  const auto all = all_feasible(g);
  CHECK_FALSE(all.truncated);
  CHECK(all.solutions.size() == 9);

  const Solution s = solution_from_nodes(g, {position_of(g, "S5"), position_of(g, "S1")});
  CHECK(s.qos == QoSVector{270, 50, 20});
  CHECK(format_solution(s, fx.repository.ontology, h.registry()) ==
        "level 0\n"
        "feasible yes\n"
        "node S1\n"
        "node S5\n"
        "wire source -> S1 : q\n"
        "wire S1 -> S5 : x\n"
        "wire S5 -> sink : y\n"
        "qos response_time=270, throughput=50, invocation_cost=20\n");

  const auto fastest = optimal_single(g, 0);
  CHECK(fastest.exact);
  CHECK(sorted_ids(fastest.solution) == std::vector<std::string>{"S2", "S4"});
  CHECK(fastest.solution.qos[0] == 150);
  const auto widest = optimal_single(g, 1);
  CHECK(widest.exact);
  CHECK(widest.solution.qos[1] == 50);
  const auto cheapest = optimal_single(g, 2);
  CHECK_FALSE(cheapest.exact);
  CHECK(cheapest.solution.qos[2] == 20);
}

TEST_CASE("example 6 has two level-1 compositions") {
  const auto fx = example_fixture(6);
  const auto h = AbstractionHierarchy::build(fx.repository, fx.scope);
  const auto g = build_graph(h, 1, fx.query);
  CHECK(all_feasible(g).solutions.size() == 2);
  const auto capped = all_feasible(g, 1);
  CHECK(capped.truncated);
  CHECK(capped.solutions.size() == 1);

  const auto g0 = build_graph(h, 0, fx.query);
  SearchOptions tiny;
  tiny.max_expansions = 1;
  const auto r = constrained_multi(g0, fx.query.constraints, tiny);
  CHECK(r.found);
  CHECK_FALSE(r.satisfied);
  CHECK(r.truncated);
  const auto full = constrained_multi(g0, fx.query.constraints);
  CHECK_FALSE(full.satisfied);
  CHECK_FALSE(full.truncated);
  CHECK(full.violated == violated_params(h.registry(), full.solution.qos,
                                         fx.query.constraints));
}

TEST_CASE("infeasible graphs yield no solution") {
  const auto fx = example_fixture(4);
  const auto h = AbstractionHierarchy::build(fx.repository, fx.scope);
  Query q = fx.query;
  q.inputs = {fx.repository.ontology.resolve("y")};
  q.outputs = {fx.repository.ontology.resolve("x")};
  const auto g = build_graph(h, 0, q);
  CHECK_FALSE(g.feasible);
  CHECK_FALSE(optimal_single(g, 0).found);
  CHECK_FALSE(constrained_multi(g, {}).found);
  CHECK(all_feasible(g).solutions.empty());
}

TEST_CASE("single-parameter engines against exhaustive search") {
  std::mt19937_64 rng(31);
  qosar::testing::InstanceShape shape;
  shape.services_max = 12;
  std::size_t exact = 0;
  for (int iter = 0; iter < 300; ++iter) {
    const auto reg = qosar::testing::random_registry(rng, 1);
    const auto repo = qosar::testing::random_repository(reg, shape, rng);
    const auto q = qosar::testing::random_query(repo, shape, rng, true);
    const auto h = AbstractionHierarchy::build(repo);
    const auto g = build_graph(h, 0, q);
    if (!g.feasible) continue;
    const oracle::SubsetSearch search(reg, pointers(repo.services), q.inputs,
                                      q.outputs);
    CAPTURE(iter);
    for (std::size_t p = 0; p < reg.size(); ++p) {
      const auto best = search.optimum(p);
      REQUIRE(best.has_value());
      const auto r = optimal_single(g, p);
      REQUIRE(r.found);
      check_against_oracle(reg, r.solution, q);
      if (r.exact) {
        ++exact;
        CHECK(r.solution.qos[p] == *best);
      } else {
        CHECK_FALSE(reg[p].strictly_better(r.solution.qos[p], *best));
      }
    }
  }
  CHECK(exact > 100);
}

TEST_CASE("constrained search agrees with exhaustive search") {
  std::mt19937_64 rng(47);
  qosar::testing::InstanceShape shape;
  shape.services_max = 12;
  std::size_t satisfiable = 0, unsatisfiable = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const auto reg = qosar::testing::random_registry(rng, 2);
    const auto repo = qosar::testing::random_repository(reg, shape, rng);
    Query q = qosar::testing::random_query(repo, shape, rng, true);
    const oracle::SubsetSearch search(reg, pointers(repo.services), q.inputs,
                                      q.outputs);
    const auto all = search.feasible_qos();
    if (all.empty()) continue;
    q.constraints = qosar::testing::random_bounds(
        reg, all[std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng)],
        rng);
    const auto h = AbstractionHierarchy::build(repo);
    const auto g = build_graph(h, 0, q);
    const auto r = constrained_multi(g, q.constraints);
    CAPTURE(iter);
    REQUIRE(r.found);
    check_against_oracle(reg, r.solution, q);
    const bool expect = search.satisfying(q.constraints).has_value();
    CHECK(r.satisfied == expect);
    CHECK(r.satisfied == r.violated.empty());
    (expect ? satisfiable : unsatisfiable)++;
  }
  CHECK(satisfiable > 50);
  CHECK(unsatisfiable > 20);
}

TEST_CASE("enumeration returns minimal feasible sets") {
  std::mt19937_64 rng(53);
  qosar::testing::InstanceShape shape;
  shape.services_max = 10;
  for (int iter = 0; iter < 200; ++iter) {
    const auto reg = qosar::testing::random_registry(rng, 1);
    const auto repo = qosar::testing::random_repository(reg, shape, rng);
    const auto q = qosar::testing::random_query(repo, shape, rng, true);
    const auto h = AbstractionHierarchy::build(repo);
    const auto g = build_graph(h, 0, q);
    if (!g.feasible) continue;
    const auto minimal = oracle::SubsetSearch(reg, pointers(repo.services),
                                              q.inputs, q.outputs)
                             .minimal_feasible();
    const std::set<std::vector<std::string>> allowed(minimal.begin(), minimal.end());
    const auto e = all_feasible(g);
    CAPTURE(iter);
    CHECK_FALSE(e.solutions.empty());
    std::set<std::vector<std::string>> seen;
    for (std::size_t i = 0; i < e.solutions.size(); ++i) {
      const auto ids = sorted_ids(e.solutions[i]);
      CHECK(allowed.count(ids) == 1);
      CHECK(seen.insert(ids).second);
      if (i > 0) {
        CHECK(e.solutions[i - 1].nodes.size() <= e.solutions[i].nodes.size());
      }
      check_against_oracle(reg, e.solutions[i], q);
    }
  }
}
