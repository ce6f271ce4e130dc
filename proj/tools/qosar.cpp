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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qosar/abstraction.hpp"
#include "qosar/bench.hpp"
#include "qosar/compose.hpp"
#include "qosar/error.hpp"
#include "qosar/generator.hpp"
#include "qosar/graph.hpp"
#include "qosar/refine.hpp"
#include "qosar/repository.hpp"

namespace fs = std::filesystem;
using namespace qosar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoAnswer = 1;
constexpr int kExitInput = 2;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

// "name=lo:hi, name=lo:hi" pins normalization extremes per parameter.
NormalizationScope parse_extremes(const std::string& text,
                                  const QoSRegistry& reg) {
  NormalizationScope scope;
  scope.extremes.resize(reg.size());
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    start = end + 1;
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) {
      throw ValidationError("bad extremes entry '" + item + "'");
    }
    const auto lo = parse_number(item.substr(eq + 1, colon - eq - 1));
    const auto hi = parse_number(item.substr(colon + 1));
    if (!lo || !hi || *lo > *hi) {
      throw ValidationError("bad extremes range in '" + item + "'");
    }
    scope.extremes[reg.index(item.substr(0, eq))] = std::make_pair(*lo, *hi);
  }
  return scope;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const auto v = parse_number(text.substr(start, end - start));
    if (!v || *v < 0 || *v > kTopLevel || *v != static_cast<int>(*v)) {
      throw ValidationError("bad level list '" + text + "'");
    }
    levels.push_back(static_cast<int>(*v));
    start = end + 1;
  }
  return levels;
}

AbstractionHierarchy load_hierarchy(const std::string& repo_path,
                                    const std::string& hierarchy_path,
                                    const std::string& extremes) {
  if (!hierarchy_path.empty()) {
    return import_hierarchy(read_text_file(hierarchy_path));
  }
  auto repo = std::make_shared<const Repository>(load_repository(repo_path));
  NormalizationScope scope;
  if (!extremes.empty()) scope = parse_extremes(extremes, repo->registry);
  return AbstractionHierarchy::build(repo, scope);
}

struct GenArgs {
  std::string fixture = "synthetic";
  std::string config;
  std::uint64_t seed = 1;
  std::string out;
  std::string query_out;
  std::size_t num_queries = 0;
  std::string query_dir;
};

int run_gen(const GenArgs& a) {
  if (a.fixture == "synthetic") {
    GeneratorConfig cfg;
    if (!a.config.empty()) cfg = GeneratorConfig::parse(read_text_file(a.config));
    const Repository repo = generate_synthetic(cfg, a.seed);
    emit(a.out, format_repository(repo));
    if (a.num_queries > 0) {
      if (a.query_dir.empty()) {
        throw ValidationError("--num-queries needs --query-dir");
      }
      fs::create_directories(a.query_dir);
      for (const auto& q : generate_queries(repo, a.num_queries, a.seed)) {
        write_text_file(fs::path(a.query_dir) / (q.id + ".query"),
                        format_query(q, repo));
      }
    }
    std::cerr << "services " << repo.services.size() << "\n";
    return kExitOk;
  }
  Repository repo;
  Query query;
  if (a.fixture == "tour") {
    repo = tour_planning_repository();
    query = tour_planning_query(repo);
  } else {
    const int which = a.fixture == "example4"   ? 4
                      : a.fixture == "example5" ? 5
                      : a.fixture == "example6" ? 6
                                                : 0;
    if (which == 0) throw ValidationError("unknown fixture '" + a.fixture + "'");
    auto fx = example_fixture(which);
    repo = std::move(fx.repository);
    query = std::move(fx.query);
  }
  emit(a.out, format_repository(repo));
  if (!a.query_out.empty()) write_text_file(a.query_out, format_query(query, repo));
  return kExitOk;
}

struct AbstractArgs {
  std::string repo;
  std::string out;
  std::string extremes;
};

int run_abstract(const AbstractArgs& a) {
  const auto h = load_hierarchy(a.repo, "", a.extremes);
  emit(a.out, export_hierarchy(h));
  auto& log = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
  for (int k = 0; k <= kTopLevel; ++k) {
    log << "level " << k << " services " << h.size(k) << "\n";
  }
  return kExitOk;
}

struct ComposeArgs {
  std::string repo;
  std::string hierarchy;
  std::string query;
  std::string extremes;
  int level = kTopLevel;
  std::string param;
  std::string bounds;
  bool trace = false;
  bool dump_graph = false;
  bool keep_subservices = false;
  std::size_t max_expansions = SearchOptions{}.max_expansions;
};

int run_compose(const ComposeArgs& a) {
  if (a.repo.empty() == a.hierarchy.empty()) {
    throw ValidationError("give exactly one of --repo and --hierarchy");
  }
  const auto h = load_hierarchy(a.repo, a.hierarchy, a.extremes);
  const Repository& repo = h.repository();
  Query query = load_query(a.query, repo);
  if (!a.bounds.empty()) {
    for (const auto& [p, v] : parse_bounds(a.bounds, repo.registry)) {
      query.constraints[p] = v;
    }
  }
  GraphOptions gopts;
  gopts.eliminate_subservices = !a.keep_subservices;
  const DependencyGraph graph = build_graph(h, a.level, query, gopts);
  if (a.dump_graph) std::cout << dump_graph(graph);

  OrchestrateOptions o;
  o.start_level = a.level;
  o.start_graph = &graph;
  o.search.max_expansions = a.max_expansions;
  if (!a.param.empty()) o.objective = repo.registry.index(a.param);
  const Outcome out = orchestrate(h, query, o);

  std::cout << "status " << to_string(out.status) << "\n";
  if (out.status == Status::kInfeasible) return kExitNoAnswer;
  std::cout << "answered_level " << out.answered_level << "\n"
            << "refine_passes " << out.qos_refinement_passes << "\n"
            << "complete_refinements " << out.complete_refinements << "\n";
  if (out.truncated) std::cout << "search truncated\n";
  if (out.answered_level > 0) {
    std::cout << format_solution(out.answered, repo.ontology, repo.registry,
                                 query.constraints);
  }
  std::cout << format_solution(out.concrete, repo.ontology, repo.registry,
                               query.constraints);
  if (a.trace) std::cout << to_text(out.trace);
  return out.status == Status::kSatisfied ? kExitOk : kExitNoAnswer;
}

struct BenchArgs {
  std::string repo;
  std::string config;
  std::string extremes;
  std::string query_dir;
  std::string levels = "0,4";
  std::size_t repeat = 3;
  std::uint64_t seed = 1;
  std::size_t num_queries = 10;
  std::string bounds;
  std::string param;
  std::string csv;
};

int run_bench(const BenchArgs& a) {
  std::shared_ptr<const Repository> repo;
  if (!a.repo.empty()) {
    repo = std::make_shared<const Repository>(load_repository(a.repo));
  } else {
    GeneratorConfig cfg;
    if (!a.config.empty()) cfg = GeneratorConfig::parse(read_text_file(a.config));
    repo = std::make_shared<const Repository>(generate_synthetic(cfg, a.seed));
  }
  NormalizationScope scope;
  if (!a.extremes.empty()) scope = parse_extremes(a.extremes, repo->registry);
  const auto h = AbstractionHierarchy::build(repo, scope);

  std::vector<Query> queries;
  if (!a.query_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.query_dir)) {
      if (e.path().extension() == ".query") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      queries.push_back(load_query(f, *repo));
      if (queries.back().id.empty()) queries.back().id = f.stem().string();
    }
  } else {
    queries = generate_queries(*repo, a.num_queries, a.seed);
  }
  if (!a.bounds.empty()) {
    const auto extra = parse_bounds(a.bounds, repo->registry);
    for (auto& q : queries) {
      for (const auto& [p, v] : extra) q.constraints[p] = v;
    }
  }

  SuiteOptions opts;
  opts.levels = parse_levels(a.levels);
  opts.repeat = a.repeat;
  if (!a.param.empty()) opts.objective = repo->registry.index(a.param);
  const SuiteResult result = run_suite(h, queries, opts);
  if (!a.csv.empty()) write_text_file(a.csv, format_csv(result.rows));
  std::cout << "services " << repo->services.size() << " queries "
            << queries.size() << "\n"
            << format_metrics(result.metrics);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QoS-aware service composition over abstraction levels"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a synthetic or fixture repository");
  g->add_option("--fixture", gen.fixture, "synthetic, tour, example4, example5 or example6")
      ->check(CLI::IsMember({"synthetic", "tour", "example4", "example5", "example6"}));
  g->add_option("--config", gen.config, "Generator config file (key=value)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Repository output path (default stdout)");
  g->add_option("--query-out", gen.query_out, "Fixture query output path");
  g->add_option("--num-queries", gen.num_queries, "Synthetic queries to generate");
  g->add_option("--query-dir", gen.query_dir, "Directory for generated queries");

  AbstractArgs abs;
  auto* ab = app.add_subcommand("abstract", "Build and export the abstraction hierarchy");
  ab->add_option("--repo", abs.repo, "Repository file")->required();
  ab->add_option("--out", abs.out, "Hierarchy output path (default stdout)");
  ab->add_option("--extremes", abs.extremes, "Pinned extremes: name=lo:hi,...");

  ComposeArgs comp;
  auto* c = app.add_subcommand("compose", "Answer one query");
  c->add_option("--repo", comp.repo, "Repository file");
  c->add_option("--hierarchy", comp.hierarchy, "Exported hierarchy file");
  c->add_option("--query", comp.query, "Query file")->required();
  c->add_option("--extremes", comp.extremes, "Pinned extremes: name=lo:hi,...");
  c->add_option("--level", comp.level, "Starting abstraction level")
      ->check(CLI::Range(0, kTopLevel));
  c->add_option("--param", comp.param, "Objective for unbounded queries");
  c->add_option("--bounds", comp.bounds, "Extra bounds: name=value,...");
  c->add_flag("--trace", comp.trace, "Print the refinement trace");
  c->add_flag("--dump-graph", comp.dump_graph, "Print the starting dependency graph");
  c->add_flag("--keep-subservices", comp.keep_subservices,
              "Skip level-4 sub-service elimination");
  c->add_option("--max-expansions", comp.max_expansions, "Search expansion cap");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run a benchmark suite");
  b->add_option("--repo", bench.repo, "Repository file (default: synthetic)");
  b->add_option("--config", bench.config, "Generator config for the synthetic repository");
  b->add_option("--extremes", bench.extremes, "Pinned extremes: name=lo:hi,...");
  b->add_option("--query-dir", bench.query_dir, "Directory of *.query files");
  b->add_option("--num-queries", bench.num_queries, "Generated queries");
  b->add_option("--levels", bench.levels, "Comma-separated starting levels");
  b->add_option("--repeat", bench.repeat, "Timing repetitions per cell");
  b->add_option("--seed", bench.seed, "Seed for the repository and queries");
  b->add_option("--bounds", bench.bounds, "Bounds added to every query");
  b->add_option("--param", bench.param, "Objective for unbounded queries");
  b->add_option("--csv", bench.csv, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*g) return run_gen(gen);
    if (*ab) return run_abstract(abs);
    if (*c) return run_compose(comp);
    if (*b) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
