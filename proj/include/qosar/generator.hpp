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

#ifndef QOSAR_GENERATOR_HPP_
#define QOSAR_GENERATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qosar/qos.hpp"
#include "qosar/repository.hpp"

namespace qosar {

// Synthetic repository layout. Each category performs one task with a fixed
// set of output concepts; its sub-categories are input/output variants of the
// task, and every service of a sub-category shares the same I/O.
struct GeneratorConfig {
  std::size_t categories = 30;
  std::size_t subcategories_min = 3;
  std::size_t subcategories_max = 4;
  std::size_t services_min = 10;
  std::size_t services_max = 30;
  std::size_t max_parents = 2;          // inter-category dependency density
  std::size_t external_inputs = 2;      // user-supplied inputs per category
  std::size_t outputs_per_category = 3;

  double rt_mean = 200.0;
  double rt_sd = 60.0;
  double throughput_min = 10.0;
  double throughput_max = 100.0;
  double reliability_min = 0.9;
  double reliability_max = 0.999;
  double availability_min = 0.9;
  double availability_max = 0.999;
  double cost_min = 1.0;
  double cost_max = 50.0;

  // Throws ConfigError when the values are inconsistent.
  void validate() const;

  // key=value lines; '#' starts a comment. Unknown keys are errors.
  static GeneratorConfig parse(std::string_view text);
  std::string format() const;
};

// Deterministic for a fixed (config, seed); uses the default QoS registry.
Repository generate_synthetic(const GeneratorConfig& config,
                              std::uint64_t seed);

struct QueryGenOptions {
  std::size_t outputs_min = 2;
  std::size_t outputs_max = 4;
  // Fraction of the never-produced input concepts handed to each query.
  double input_fraction = 1.0;
  std::size_t max_attempts = 1000;
};

// Random queries whose outputs are reachable from their inputs by forward
// chaining over the concrete services. Queries carry no bounds.
std::vector<Query> generate_queries(const Repository& repo, std::size_t count,
                                    std::uint64_t seed,
                                    const QueryGenOptions& options = {});

// Hand-built trip-planning repository: 19 categories, 26 sub-categories and
// 99 services, with the matching user query.
Repository tour_planning_repository();
Query tour_planning_query(const Repository& repo);

// Small two/three-class fixtures over (response_time, throughput,
// invocation_cost). `which` is 4, 5 or 6; fixture 5 carries bounds
// (200, 50, 50) and fixture 6 adds the alternative class {S7, S8} with bounds
// (125, 50, 50). The normalization extremes are pinned explicitly.
struct ExampleFixture {
  Repository repository;
  Query query;
  NormalizationScope scope;
};
ExampleFixture example_fixture(int which);

}  // namespace qosar

#endif  // QOSAR_GENERATOR_HPP_
