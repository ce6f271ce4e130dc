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
#include "qosar/abstraction.hpp"
#include "qosar/error.hpp"
#include "qosar/generator.hpp"

using namespace qosar;
using qosar::testing::pointers;
using qosar::testing::pointers_of;

namespace {

std::set<std::string> representative_ids(const AbstractionHierarchy& h) {
  std::set<std::string> out;
  for (const auto& a : h.level(1)) out.insert(h.service(0, *a.representative).id);
  return out;
}

Service make(std::string id, ConceptSet in, ConceptSet out, QoSVector qos) {
  Service s;
  s.id = std::move(id);
  s.inputs = std::move(in);
  s.outputs = std::move(out);
  s.qos = std::move(qos);
  return s;
}

}  // namespace

TEST_CASE("relations between services") {
  const Service a = make("a", {1}, {2, 3}, {});
  const Service b = make("b", {1, 4}, {2}, {});
  const Service c = make("c", {1}, {2, 3}, {});
  CHECK(equivalent(a, c));
  CHECK_FALSE(equivalent(a, b));
  CHECK(dominates(a, b));
  CHECK_FALSE(dominates(b, a));
  CHECK(dominates(a, c));
  CHECK(input_equivalent(a, c));
  CHECK_FALSE(input_equivalent(a, b));
  CHECK(output_equivalent(a, c));
}

TEST_CASE("partition ordering") {
  const std::vector<Service> s{make("s1", {1}, {2}, {}), make("s2", {2}, {3}, {}),
                               make("s3", {1}, {2}, {}), make("s0", {2}, {3}, {})};
  const auto p = equivalence_partition(pointers(s));
  REQUIRE(p.size() == 2);
  // {s0, s2} has the smaller id and comes first; members ordered by id.
  CHECK(p[0] == std::vector<std::size_t>{3, 1});
  CHECK(p[1] == std::vector<std::size_t>{0, 2});
}

TEST_CASE("representative selection") {
  const auto reg = qosar::testing::registry_of({"response_time", "throughput"});
  SUBCASE("a member dominating every other wins") {
    const std::vector<Service> s{make("a", {0}, {1}, {10, 50}),
                                 make("b", {0}, {1}, {5, 60}),
                                 make("c", {0}, {1}, {20, 10})};
    CHECK(best_representative(pointers(s), reg) == 1);
  }
  SUBCASE("otherwise the smallest worst deviation") {
    const std::vector<Service> s{make("a", {0}, {1}, {0, 0}),
                                 make("b", {0}, {1}, {100, 100}),
                                 make("c", {0}, {1}, {40, 60})};
    CHECK(best_representative(pointers(s), reg) == 2);
  }
  SUBCASE("ties go to the smallest id") {
    const std::vector<Service> s{make("z", {0}, {1}, {10, 50}),
                                 make("m", {0}, {1}, {10, 50})};
    CHECK(best_representative(pointers(s), reg) == 1);
  }
}

TEST_CASE("example 4 representatives depend on the normalization scope") {
  const auto fx = example_fixture(4);
  const auto pinned = AbstractionHierarchy::build(fx.repository, fx.scope);
  CHECK(representative_ids(pinned) == std::set<std::string>{"S3", "S5"});
  CHECK(pinned.level(1)[0].qos == QoSVector{125, 100, 20});
  CHECK(pinned.level(1)[1].qos == QoSVector{150, 50, 10});

  // Extremes taken inside each class pick S2 for the first class.
  const auto local = AbstractionHierarchy::build(fx.repository);
  CHECK(representative_ids(local).count("S2") == 1);
}

TEST_CASE("example 6 adds the {S7, S8} class") {
  const auto fx = example_fixture(6);
  const auto h = AbstractionHierarchy::build(fx.repository, fx.scope);
  CHECK(h.size(1) == 3);
  CHECK(representative_ids(h) == std::set<std::string>{"S3", "S5", "S7"});
}

TEST_CASE("tour planning level sizes") {
  const auto h = AbstractionHierarchy::build(tour_planning_repository());
  CHECK(h.size(0) == 99);
  CHECK(h.size(1) == 26);
  CHECK(h.size(2) == 19);
  CHECK(h.size(3) == 16);
  CHECK(h.size(4) == 16);
  CHECK(h.find(1, "L1.0001") == 0u);
  CHECK_FALSE(h.find(1, "L9.0001").has_value());
  CHECK_NOTHROW(h.check_integrity());
}

TEST_CASE("level invariants on random repositories") {
  std::mt19937_64 rng(2024);
  qosar::testing::InstanceShape shape;
  shape.services_max = 30;
  shape.signatures_max = 12;
  for (int iter = 0; iter < 300; ++iter) {
    const auto reg = qosar::testing::random_registry(rng, 2);
    const auto repo = qosar::testing::random_repository(reg, shape, rng);
    const auto h = AbstractionHierarchy::build(repo);
    CAPTURE(iter);

    // Levels 1 and 3 partition the level below; level-2 groups may overlap
    // but cover every level-1 service.
    for (int k = 1; k <= 3; ++k) {
      std::vector<int> uses(h.size(k - 1), 0);
      for (const auto& a : h.level(k)) {
        for (std::size_t m : a.members) ++uses[m];
      }
      const bool overlap_allowed = k == 2;
      CHECK(std::all_of(uses.begin(), uses.end(), [&](int u) {
        return overlap_allowed ? u >= 1 : u == 1;
      }));
    }

    for (std::size_t i = 0; i < h.size(1); ++i) {
      const auto& a = h.service(1, i);
      CHECK(h.concrete_members(1, i) == a.members);
      CHECK(h.default_expansion(1, i) == std::vector<std::size_t>{*a.representative});
    }

    const auto& l1 = h.level(1);
    for (const auto& g : h.level(2)) {
      const auto& seed = l1[*g.representative];
      for (const auto& other : l1) {
        CHECK_FALSE((&other != &seed && dominates(other, seed)));
      }
      std::vector<std::size_t> closure;
      for (std::size_t x = 0; x < l1.size(); ++x) {
        if (dominates(seed, l1[x])) closure.push_back(x);
      }
      CHECK(g.members == closure);
      CHECK(equivalent(g, seed));
    }

    std::set<ConceptSet> inputs3;
    for (const auto& a : h.level(3)) {
      CHECK(inputs3.insert(a.inputs).second);
      ConceptSet outs;
      for (std::size_t m : a.members) {
        CHECK(h.service(2, m).inputs == a.inputs);
        insert_all(outs, h.service(2, m).outputs);
      }
      CHECK(outs == a.outputs);
      CHECK_FALSE(a.representative.has_value());
    }

    REQUIRE(h.size(4) == h.size(3));
    const auto l3 = pointers_of(h.level(3));
    for (std::size_t i = 0; i < h.size(4); ++i) {
      const auto& a = h.service(4, i);
      CHECK(a.representative == i);
      const ConceptSet start = set_union(l3[i]->inputs, l3[i]->outputs);
      const ConceptSet reach = oracle::forward_closure(l3, start);
      std::vector<std::size_t> expect;
      for (std::size_t j = 0; j < l3.size(); ++j) {
        if (j == i || is_subset(l3[j]->inputs, reach)) expect.push_back(j);
      }
      CHECK(a.members == expect);
      CHECK(a.inputs == l3[i]->inputs);
      const auto closure = fusion_closure(h.level(3), i);
      CHECK(closure.front() == i);
      CHECK(h.fusion(i).services.front() == i);
    }
  }
}

TEST_CASE("a dominance chain forms one group") {
  Repository repo;
  repo.registry = qosar::testing::registry_of({"response_time"});
  for (const char* c : {"a", "b", "c", "d"}) repo.ontology.add(c);
  repo.services = {make("top", {0}, {1, 2, 3}, {5}), make("mid", {0}, {1, 2}, {3}),
                   make("low", {0, 3}, {1}, {1})};
  const auto h = AbstractionHierarchy::build(repo);
  REQUIRE(h.size(2) == 1);
  const auto& g = h.service(2, 0);
  CHECK(g.members.size() == 3);
  CHECK(h.service(1, *g.representative).outputs == ConceptSet{1, 2, 3});
  CHECK(g.qos == QoSVector{5});
}

TEST_CASE("level-3 QoS folds members with the parallel rule") {
  const auto reg = qosar::testing::registry_of(
      {"response_time", "throughput", "reliability", "invocation_cost"});
  Repository repo;
  repo.registry = reg;
  for (const char* c : {"a", "b", "c"}) repo.ontology.add(c);
  repo.services = {make("s1", {0}, {1}, {10, 40, 0.9, 3}),
                   make("s2", {0}, {2}, {25, 70, 0.8, 4})};
  const auto h = AbstractionHierarchy::build(repo);
  REQUIRE(h.size(3) == 1);
  const auto& a = h.service(3, 0);
  CHECK(a.outputs == ConceptSet{1, 2});
  CHECK(a.qos[0] == 25.0);
  CHECK(a.qos[1] == 40.0);
  CHECK(a.qos[2] == doctest::Approx(0.72));
  CHECK(a.qos[3] == 7.0);
}

TEST_CASE("fusion follows chains from the seed") {
  Repository repo;
  repo.registry = qosar::testing::registry_of({"response_time", "invocation_cost"});
  for (const char* c : {"a", "b", "c", "d", "e"}) repo.ontology.add(c);
  repo.services = {make("s1", {0}, {1}, {10, 1}), make("s2", {1}, {2}, {20, 2}),
                   make("s3", {1, 2}, {3}, {5, 3}), make("s4", {4}, {3}, {1, 1})};
  const auto h = AbstractionHierarchy::build(repo);
  const auto i = *h.find(4, "L4.0001");
  const auto& a = h.service(4, i);
  CHECK(h.concrete_members(4, i) == std::vector<std::size_t>{0, 1, 2});
  CHECK(a.outputs == ConceptSet{1, 2, 3});
  CHECK(a.inputs == ConceptSet{0});
  // s1 -> s2 -> s3 is the critical path: 10 + 20 + 5.
  CHECK(a.qos == QoSVector{35, 6});
}

TEST_CASE("export and import round-trip") {
  const auto tour = AbstractionHierarchy::build(tour_planning_repository());
  const std::string text = export_hierarchy(tour);
  const auto back = import_hierarchy(text);
  CHECK(export_hierarchy(back) == text);
  for (int k = 0; k <= kTopLevel; ++k) CHECK(back.size(k) == tour.size(k));

  const auto fx = example_fixture(5);
  const auto pinned = AbstractionHierarchy::build(fx.repository, fx.scope);
  const auto again = import_hierarchy(export_hierarchy(pinned));
  CHECK(again.scope().fixed(0));
  CHECK(export_hierarchy(again) == export_hierarchy(pinned));

  std::mt19937_64 rng(8);
  qosar::testing::InstanceShape shape;
  for (int i = 0; i < 50; ++i) {
    const auto reg = qosar::testing::random_registry(rng, 1);
    const auto h = AbstractionHierarchy::build(
        qosar::testing::random_repository(reg, shape, rng));
    CHECK(export_hierarchy(import_hierarchy(export_hierarchy(h))) ==
          export_hierarchy(h));
  }
}

TEST_CASE("import rejects inconsistent hierarchies") {
  const auto fx = example_fixture(4);
  const std::string text =
      export_hierarchy(AbstractionHierarchy::build(fx.repository, fx.scope));
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    const auto at = t.find(from);
    REQUIRE(at != std::string::npos);
    t.replace(at, from.size(), to);
    return t;
  };
  CHECK_THROWS_AS(import_hierarchy(replace("members: S1, S2, S3", "members: S1, S2, S9")),
                  IntegrityError);
  CHECK_THROWS_AS(import_hierarchy(replace("members: S1, S2, S3", "members: S1, S2")),
                  IntegrityError);
  CHECK_THROWS_AS(import_hierarchy(replace("representative: S3", "representative: S1")),
                  IntegrityError);
  CHECK_THROWS(import_hierarchy(replace("[level 3]", "[level 7]")));
}
