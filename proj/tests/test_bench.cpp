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
#include <cmath>
#include <random>

#include "qosar/bench.hpp"
#include "qosar/error.hpp"
#include "qosar/generator.hpp"

using namespace qosar;

namespace {

BenchRow row(std::string id, int level, double rt, double tr, double ni,
             std::size_t nsd, double build, double solve) {
  BenchRow r;
  r.query_id = std::move(id);
  r.level = level;
  r.feasible = true;
  r.rt = rt;
  r.tr = tr;
  r.ni = ni;
  r.cost = 1.5;
  r.reliability = NAN;
  r.nsd = nsd;
  r.build_ms = build;
  r.solve_ms = solve;
  r.refine_passes = 1;
  r.final_level = level;
  r.status = "satisfied";
  return r;
}

// Timing columns zeroed so that two runs can be compared.
std::vector<BenchRow> content(std::vector<BenchRow> rows) {
  for (auto& r : rows) r.build_ms = r.solve_ms = 0.0;
  return rows;
}

}  // namespace

TEST_CASE("tour planning node counts give the expected ASI") {
  const Metrics m = compute_metrics(
      {row("tour", 0, 1, 1, 1, 64, 1, 1), row("tour", 2, 1, 1, 1, 13, 1, 1)}, 2);
  REQUIRE(m.asi.has_value());
  CHECK(*m.asi == doctest::Approx(4.923).epsilon(1e-3));
  CHECK(*m.asi == 64.0 / 13.0);
}

TEST_CASE("metrics are averages of per-query ratios") {
  const std::vector<BenchRow> rows{
      row("a", 0, 100, 10, 2, 10, 1, 3), row("a", 4, 150, 5, 3, 5, 1, 1),
      row("b", 0, 80, 20, 4, 8, 2, 2),   row("b", 4, 40, 40, 2, 2, 0.5, 0.5)};
  const Metrics m = compute_metrics(rows, 4);
  CHECK(m.queries == 2);
  CHECK(*m.arr == (1.5 + 0.5) / 2);
  CHECK(*m.atr == (2.0 + 0.5) / 2);
  CHECK(*m.air == (1.5 + 0.5) / 2);
  CHECK(*m.asi == (2.0 + 4.0) / 2);
  CHECK(*m.acs == (2.0 + 4.0) / 2);

  std::vector<BenchRow> shuffled = rows;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(compute_metrics(shuffled, 4) == m);
  }
}

TEST_CASE("unavailable metrics stay empty") {
  const Metrics none = compute_metrics({}, 4);
  CHECK(none.queries == 0);
  CHECK_FALSE(none.arr.has_value());

  BenchRow failed = row("a", 4, 1, 1, 1, 1, 1, 1);
  failed.feasible = false;
  const Metrics m = compute_metrics({row("a", 0, 1, 1, 1, 1, 1, 1), failed}, 4);
  CHECK(m.queries == 0);
  CHECK_FALSE(m.acs.has_value());

  // NaN throughput on both sides: that ratio is skipped, others are kept.
  BenchRow b0 = row("b", 0, 10, NAN, 1, 4, 1, 1);
  BenchRow b4 = row("b", 4, 20, NAN, 1, 2, 1, 1);
  const Metrics partial = compute_metrics({b0, b4}, 4);
  CHECK(partial.queries == 1);
  CHECK_FALSE(partial.atr.has_value());
  CHECK(*partial.arr == 2.0);
}

TEST_CASE("CSV round-trip") {
  std::vector<BenchRow> rows{row("a", 0, 100.25, 10, 2, 10, 1.125, 3),
                             row("a", 4, 150, 5, 3, 5, 1, 1)};
  rows[1].status = "error: bad; input";
  rows[1].feasible = false;
  const std::string csv = format_csv(rows);
  CHECK(csv.rfind("query_id,level,feasible,rt,tr,ni,cost,reliability,nsd,"
                  "build_ms,solve_ms,refine_passes,final_level,status\n",
                  0) == 0);
  CHECK(csv.find(",nan,") != std::string::npos);
  const auto back = parse_csv(csv);
  CHECK(back == rows);
  CHECK(compute_metrics(back, 4) == compute_metrics(rows, 4));
  CHECK(parse_csv(format_csv({})).empty());
}

TEST_CASE("CSV parse errors") {
  CHECK_THROWS_AS(parse_csv("id,level\n"), ParseError);
  const std::string header =
      "query_id,level,feasible,rt,tr,ni,cost,reliability,nsd,build_ms,"
      "solve_ms,refine_passes,final_level,status\n";
  CHECK_THROWS_AS(parse_csv(header + "a,0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(header + "a,0,1,x,1,1,1,1,1,1,1,0,0,ok\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(header + "a,0.5,1,1,1,1,1,1,1,1,1,0,0,ok\n"), ParseError);
}

TEST_CASE("metric report text") {
  std::map<int, Metrics> m;
  m[4] = compute_metrics({row("a", 0, 2, 2, 2, 2, 2, 2), row("a", 4, 1, 1, 1, 1, 1, 1)}, 4);
  m[1] = Metrics{};
  CHECK(format_metrics(m) ==
        "level 1: queries=0 ARR=n/a ATR=n/a AIR=n/a ASI=n/a ACS=n/a\n"
        "level 4: queries=1 ARR=0.5 ATR=2 AIR=0.5 ASI=2 ACS=2\n");
}

TEST_CASE("suite over the worked examples") {
  SuiteOptions opts;
  opts.levels = {0, 1, 4};
  opts.repeat = 1;

  const auto f5 = example_fixture(5);
  const auto h5 = AbstractionHierarchy::build(f5.repository, f5.scope);
  const auto r5 = run_suite(h5, {f5.query}, opts);
  REQUIRE(r5.rows.size() == 3);
  for (const auto& r : r5.rows) {
    CHECK(r.status == "satisfied");
    CHECK(r.feasible);
    CHECK(r.ni == 2);
    CHECK(std::isnan(r.reliability));
  }
  CHECK(r5.rows[0].rt == 150);  // level 0 finds S2 -> S4 directly
  CHECK(r5.rows[0].nsd == 6);
  CHECK(r5.rows[1].rt == 200);
  CHECK(r5.rows[1].refine_passes == 1);
  CHECK(r5.rows[1].final_level == 1);
  CHECK(r5.rows[2].refine_passes == 2);
  CHECK(r5.rows[2].final_level == 1);
  CHECK(r5.metrics.count(1) == 1);
  CHECK(r5.metrics.count(4) == 1);
  CHECK(*r5.metrics.at(1).asi == 3.0);

  const auto f6 = example_fixture(6);
  const auto h6 = AbstractionHierarchy::build(f6.repository, f6.scope);
  const auto r6 = run_suite(h6, {f6.query}, opts);
  for (const auto& r : r6.rows) {
    CHECK(r.status == "unsatisfiable");
    CHECK_FALSE(r.feasible);
    CHECK(r.rt == 125);
    CHECK(r.tr == 45);
    CHECK(r.final_level == 0);
  }
  CHECK(r6.metrics.at(4).queries == 0);
}

TEST_CASE("suite edge cases") {
  const auto f4 = example_fixture(4);
  const auto h = AbstractionHierarchy::build(f4.repository, f4.scope);
  const auto empty = run_suite(h, {});
  CHECK(empty.rows.empty());
  CHECK(empty.metrics.at(kTopLevel).queries == 0);

  SuiteOptions bad;
  bad.levels = {0, 9};
  bad.repeat = 1;
  const auto r = run_suite(h, {f4.query}, bad);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].status == "satisfied");
  CHECK(r.rows[1].status.rfind("error: ", 0) == 0);
  CHECK(r.rows[1].status.find(',') == std::string::npos);
  CHECK_FALSE(r.rows[1].feasible);
}

TEST_CASE("suite content is deterministic") {
  GeneratorConfig cfg;
  cfg.categories = 10;
  auto repo = std::make_shared<const Repository>(generate_synthetic(cfg, 5));
  const auto h = AbstractionHierarchy::build(repo);
  auto queries = generate_queries(*repo, 4, 5);
  REQUIRE(queries.size() == 4);
  queries[0].constraints[0] = 1e9;
  SuiteOptions opts;
  opts.repeat = 1;
  opts.levels = {0, 2, 4};
  const auto a = run_suite(h, queries, opts);
  const auto b = run_suite(h, queries, opts);
  CHECK(content(a.rows) == content(b.rows));
  CHECK(a.rows.size() == 12);
  for (const auto& r : a.rows) {
    CHECK(r.status == "satisfied");
    CHECK(r.build_ms >= 0.0);
  }
}
