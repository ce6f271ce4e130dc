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

#ifndef QOSAR_BENCH_HPP_
#define QOSAR_BENCH_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qosar/abstraction.hpp"
#include "qosar/refine.hpp"
#include "qosar/repository.hpp"

namespace qosar {

// One query answered from one starting level. QoS columns hold NaN when the
// registry lacks the parameter or no solution was produced.
struct BenchRow {
  std::string query_id;
  int level = 0;
  bool feasible = false;  // a bound-satisfying concrete solution was returned
  double rt = 0.0;
  double tr = 0.0;
  double ni = 0.0;
  double cost = 0.0;
  double reliability = 0.0;
  std::size_t nsd = 0;  // dependency-graph size at the starting level
  double build_ms = 0.0;
  double solve_ms = 0.0;
  std::size_t refine_passes = 0;
  int final_level = -1;
  std::string status;

  bool operator==(const BenchRow& o) const;
};

// Averages over the queries that have successful runs at both `level` and
// `baseline`; a metric no query can contribute to stays empty.
//   ARR = rt(level) / rt(baseline)      ATR = tr(baseline) / tr(level)
//   AIR = ni(level) / ni(baseline)      ASI = nsd(baseline) / nsd(level)
//   ACS = ct(baseline) / ct(level), ct = build_ms + solve_ms
struct Metrics {
  std::optional<double> arr, atr, air, asi, acs;
  std::size_t queries = 0;  // queries with both runs successful

  bool operator==(const Metrics& o) const = default;
};

Metrics compute_metrics(const std::vector<BenchRow>& rows, int level,
                        int baseline = 0);

std::string format_csv(const std::vector<BenchRow>& rows);
// Throws ParseError on malformed input.
std::vector<BenchRow> parse_csv(std::string_view text);

std::string format_metrics(const std::map<int, Metrics>& metrics);

// Fills the QoS columns of `row` from a concrete solution.
void fill_qos(BenchRow& row, const Solution& concrete, const QoSRegistry& reg);

struct SuiteOptions {
  std::vector<int> levels{0, kTopLevel};
  std::size_t repeat = 3;  // timings are the median over the repetitions
  std::optional<std::size_t> objective;
  SearchOptions search;
};

struct SuiteResult {
  std::vector<BenchRow> rows;  // ordered by query, then by level
  std::map<int, Metrics> metrics;  // every non-baseline level vs level 0
};

// A failing query is recorded as a row with the error in `status`; the suite
// itself never aborts.
SuiteResult run_suite(const AbstractionHierarchy& h,
                      const std::vector<Query>& queries,
                      const SuiteOptions& options = {});

}  // namespace qosar

#endif  // QOSAR_BENCH_HPP_
