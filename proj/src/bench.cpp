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

#include "qosar/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "qosar/error.hpp"
#include "text_util.hpp"

namespace qosar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::string num(double v) { return format_number(v); }

double parse_field(std::string_view s, std::size_t line) {
  if (s == "nan") return kNaN;
  auto v = parse_number(s);
  if (!v) throw ParseError(line, "bad number '" + std::string(s) + "'");
  return *v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const char* kHeader =
    "query_id,level,feasible,rt,tr,ni,cost,reliability,nsd,build_ms,solve_ms,"
    "refine_passes,final_level,status";

}  // namespace

bool BenchRow::operator==(const BenchRow& o) const {
  return query_id == o.query_id && level == o.level && feasible == o.feasible &&
         same(rt, o.rt) && same(tr, o.tr) && same(ni, o.ni) &&
         same(cost, o.cost) && same(reliability, o.reliability) &&
         nsd == o.nsd && same(build_ms, o.build_ms) &&
         same(solve_ms, o.solve_ms) && refine_passes == o.refine_passes &&
         final_level == o.final_level && status == o.status;
}

Metrics compute_metrics(const std::vector<BenchRow>& rows, int level,
                        int baseline) {
  std::map<std::string, const BenchRow*> base, with;
  for (const auto& r : rows) {
    if (!r.feasible) continue;
    if (r.level == baseline) base.emplace(r.query_id, &r);
    if (r.level == level) with.emplace(r.query_id, &r);
  }
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    void add(double num, double den) {
      if (std::isfinite(num) && std::isfinite(den) && den > 0.0) {
        sum += num / den;
        ++n;
      }
    }
    std::optional<double> mean() const {
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    }
  } arr, atr, air, asi, acs;
  Metrics m;
  for (const auto& [id, b] : base) {
    auto it = with.find(id);
    if (it == with.end()) continue;
    const BenchRow& w = *it->second;
    ++m.queries;
    arr.add(w.rt, b->rt);
    atr.add(b->tr, w.tr);
    air.add(w.ni, b->ni);
    asi.add(static_cast<double>(b->nsd), static_cast<double>(w.nsd));
    acs.add(b->build_ms + b->solve_ms, w.build_ms + w.solve_ms);
  }
  m.arr = arr.mean();
  m.atr = atr.mean();
  m.air = air.mean();
  m.asi = asi.mean();
  m.acs = acs.mean();
  return m;
}

std::string format_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const auto& r : rows) {
    out << r.query_id << ',' << r.level << ',' << (r.feasible ? 1 : 0) << ','
        << num(r.rt) << ',' << num(r.tr) << ',' << num(r.ni) << ','
        << num(r.cost) << ',' << num(r.reliability) << ',' << r.nsd << ','
        << num(r.build_ms) << ',' << num(r.solve_ms) << ',' << r.refine_passes
        << ',' << r.final_level << ',' << r.status << "\n";
  }
  return out.str();
}

std::vector<BenchRow> parse_csv(std::string_view text) {
  std::vector<BenchRow> rows;
  std::size_t line_no = 0;
  bool header = false;
  for (const auto& raw : text::lines(text)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (!header) {
      if (line != kHeader) throw ParseError(line_no, "unexpected CSV header");
      header = true;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 14) throw ParseError(line_no, "expected 14 columns");
    auto integer = [&](std::string_view s) {
      const double v = parse_field(s, line_no);
      if (v != std::floor(v)) throw ParseError(line_no, "expected an integer");
      return static_cast<long long>(v);
    };
    BenchRow r;
    r.query_id = std::string(f[0]);
    r.level = static_cast<int>(integer(f[1]));
    r.feasible = integer(f[2]) != 0;
    r.rt = parse_field(f[3], line_no);
    r.tr = parse_field(f[4], line_no);
    r.ni = parse_field(f[5], line_no);
    r.cost = parse_field(f[6], line_no);
    r.reliability = parse_field(f[7], line_no);
    r.nsd = static_cast<std::size_t>(integer(f[8]));
    r.build_ms = parse_field(f[9], line_no);
    r.solve_ms = parse_field(f[10], line_no);
    r.refine_passes = static_cast<std::size_t>(integer(f[11]));
    r.final_level = static_cast<int>(integer(f[12]));
    r.status = std::string(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_metrics(const std::map<int, Metrics>& metrics) {
  std::ostringstream out;
  auto show = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string("n/a");
  };
  for (const auto& [level, m] : metrics) {
    out << "level " << level << ": queries=" << m.queries
        << " ARR=" << show(m.arr) << " ATR=" << show(m.atr)
        << " AIR=" << show(m.air) << " ASI=" << show(m.asi)
        << " ACS=" << show(m.acs) << "\n";
  }
  return out.str();
}

void fill_qos(BenchRow& row, const Solution& concrete, const QoSRegistry& reg) {
  auto value = [&](const char* name) {
    const auto q = reg.find(name);
    return q ? concrete.qos[*q] : kNaN;
  };
  row.rt = value("response_time");
  row.tr = value("throughput");
  row.cost = value("invocation_cost");
  row.reliability = value("reliability");
  row.ni = reg.find("invocation_count")
               ? value("invocation_count")
               : static_cast<double>(concrete.nodes.size());
}

SuiteResult run_suite(const AbstractionHierarchy& h,
                      const std::vector<Query>& queries,
                      const SuiteOptions& options) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) {
    return std::chrono::duration<double, std::milli>(d).count();
  };
  SuiteResult result;
  const std::size_t repeat = std::max<std::size_t>(1, options.repeat);
  for (const auto& query : queries) {
    for (int level : options.levels) {
      BenchRow row;
      row.query_id = query.id;
      row.level = level;
      row.rt = row.tr = row.ni = row.cost = row.reliability = kNaN;
      try {
        std::vector<double> build, solve;
        Outcome outcome;
        DependencyGraph graph;
        for (std::size_t i = 0; i < repeat; ++i) {
          const auto t0 = Clock::now();
          graph = build_graph(h, level, query);
          const auto t1 = Clock::now();
          OrchestrateOptions o;
          o.start_level = level;
          o.start_graph = &graph;
          o.objective = options.objective;
          o.search = options.search;
          outcome = orchestrate(h, query, o);
          const auto t2 = Clock::now();
          build.push_back(ms(t1 - t0));
          solve.push_back(ms(t2 - t1));
        }
        row.nsd = graph.nsd();
        row.build_ms = median(build);
        row.solve_ms = median(solve);
        row.refine_passes = outcome.qos_refinement_passes;
        row.final_level = outcome.answered_level;
        row.status = to_string(outcome.status);
        row.feasible = outcome.status == Status::kSatisfied;
        if (outcome.status != Status::kInfeasible) {
          fill_qos(row, outcome.concrete, h.registry());
        }
      } catch (const std::exception& e) {
        std::string what = e.what();
        std::replace(what.begin(), what.end(), ',', ';');
        row.status = "error: " + what;
        row.feasible = false;
      }
      result.rows.push_back(std::move(row));
    }
  }
  for (int level : options.levels) {
    if (level != 0) result.metrics[level] = compute_metrics(result.rows, level, 0);
  }
  return result;
}

}  // namespace qosar
