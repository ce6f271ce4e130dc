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

#ifndef QOSAR_ABSTRACTION_HPP_
#define QOSAR_ABSTRACTION_HPP_

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qosar/qos.hpp"
#include "qosar/repository.hpp"
#include "qosar/solution.hpp"

namespace qosar {

inline constexpr int kTopLevel = 4;

// A service of some abstraction level. Level 0 holds plain copies of the
// concrete services; for level k > 0 the members index level k-1.
struct AbstractService : Service {
  int level = 0;
  std::vector<std::size_t> members;
  // Member whose QoS was adopted (levels 1 and 2) or the seed (level 4).
  std::optional<std::size_t> representative;
};

// Services are equivalent when both input and output sets are identical.
bool equivalent(const Service& a, const Service& b);
bool input_equivalent(const Service& a, const Service& b);
bool output_equivalent(const Service& a, const Service& b);

// a.inputs is a subset of b.inputs and a.outputs a superset of b.outputs.
bool dominates(const Service& a, const Service& b);

// Partition of `services` under equivalence, as index lists. Classes are
// ordered by their smallest member id, members by id.
std::vector<std::vector<std::size_t>> equivalence_partition(
    const std::vector<const Service*>& services);

// Position (within `cls`) of the member picked as best representative: a
// member at least as good as every other on all parameters if one exists,
// otherwise the member whose deviations, sorted in descending order, are
// lexicographically smallest. Remaining ties go to the smallest id.
std::size_t best_representative(const std::vector<const Service*>& cls,
                                 const QoSRegistry& registry,
                                 const NormalizationScope& scope = {});

// Dependency subgraph abstracted by one level-4 service, over level-3
// indices. `edges` index into `services` and are wired from the seed inputs.
struct FusionSubgraph {
  std::vector<std::size_t> services;
  Schedule schedule;
  std::vector<WiringEdge> edges;
};

class AbstractionHierarchy {
 public:
  // Builds all four levels. `scope` pins normalization extremes used by the
  // level-1 representative choice and by refinement gains.
  static AbstractionHierarchy build(std::shared_ptr<const Repository> repo,
                                    NormalizationScope scope = {});
  static AbstractionHierarchy build(const Repository& repo,
                                    NormalizationScope scope = {});

  // Assembles a hierarchy from explicit levels 1..4 (level 0 is derived from
  // the repository) and verifies it; throws IntegrityError on any
  // inconsistency.
  static AbstractionHierarchy assemble(
      std::shared_ptr<const Repository> repo, NormalizationScope scope,
      std::array<std::vector<AbstractService>, 4> upper);

  const Repository& repository() const { return *repo_; }
  std::shared_ptr<const Repository> repository_ptr() const { return repo_; }
  const QoSRegistry& registry() const { return repo_->registry; }
  const NormalizationScope& scope() const { return scope_; }

  const std::vector<AbstractService>& level(int k) const;
  std::size_t size(int k) const { return level(k).size(); }
  const AbstractService& service(int k, std::size_t i) const {
    return level(k)[i];
  }
  std::optional<std::size_t> find(int k, std::string_view id) const;

  const FusionSubgraph& fusion(std::size_t i) const { return fusion_.at(i); }

  // Previous-level services a level-k node stands for when nothing else is
  // known: the representative at levels 1 and 2, every member at 3 and 4.
  std::vector<std::size_t> default_expansion(int k, std::size_t i) const;

  // Every concrete service reachable through the member maps, sorted.
  std::vector<std::size_t> concrete_members(int k, std::size_t i) const;

  // Throws IntegrityError when a member map or a derived field is
  // inconsistent with the level below.
  void check_integrity() const;

 private:
  AbstractionHierarchy() = default;
  void index_ids();
  void build_fusion();

  std::shared_ptr<const Repository> repo_;
  NormalizationScope scope_;
  std::array<std::vector<AbstractService>, 5> levels_;
  std::vector<FusionSubgraph> fusion_;
  std::array<std::unordered_map<std::string, std::size_t>, 5> ids_;
};

// Level builders, exposed for tests. Each takes the previous level.
std::vector<AbstractService> abstract_level1(
    const std::vector<AbstractService>& level0, const QoSRegistry& registry,
    const NormalizationScope& scope = {});
std::vector<AbstractService> abstract_level2(
    const std::vector<AbstractService>& level1);
std::vector<AbstractService> abstract_level3(
    const std::vector<AbstractService>& level2, const QoSRegistry& registry);
std::vector<AbstractService> abstract_level4(
    const std::vector<AbstractService>& level3, const QoSRegistry& registry);

// Closure of level-3 service `seed`: indices of every service activatable
// from the seed inputs plus the outputs gathered so far, seed first, then
// ascending.
std::vector<std::size_t> fusion_closure(
    const std::vector<AbstractService>& level3, std::size_t seed);

// Text export mirroring the repository format with `members:` and
// `representative:` fields; import re-verifies the result.
std::string export_hierarchy(const AbstractionHierarchy& h);
AbstractionHierarchy import_hierarchy(std::string_view text);

}  // namespace qosar

#endif  // QOSAR_ABSTRACTION_HPP_
