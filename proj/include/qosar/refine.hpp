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

#ifndef QOSAR_REFINE_HPP_
#define QOSAR_REFINE_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qosar/abstraction.hpp"
#include "qosar/compose.hpp"
#include "qosar/graph.hpp"
#include "qosar/solution.hpp"

namespace qosar {

// Slack on a satisfied bound. Additive parameters: bound - achieved when
// lower is better, achieved - bound when higher is better. Multiplicative
// parameters: bound / achieved. Throws ContractError on a violated bound.
double laxity(const QoSParamSpec& spec, double bound, double achieved);

// Distance to a violated bound: |achieved - bound| for additive parameters,
// achieved / bound for multiplicative ones. Throws ContractError when the
// bound holds.
double violation_gap(const QoSParamSpec& spec, double bound, double achieved);

// `value` worsened by the laxity `eps`.
double relax(const QoSParamSpec& spec, double value, double eps);

// Partition of the bounded parameters for one solution QoS vector.
struct RefinementContext {
  Constraints bounds;
  std::vector<std::size_t> satisfied;
  std::vector<std::size_t> violated;
  std::map<std::size_t, double> laxities;
  std::map<std::size_t, double> gaps;

  static RefinementContext of(const QoSRegistry& registry, const QoSVector& qos,
                              const Constraints& bounds);
  bool all_satisfied() const { return violated.empty(); }
};

// Sum over `violated` of NV(candidate) - NV(incumbent), normalized over the
// member class `cls` (or the pinned extremes of `scope`).
double gain(const QoSRegistry& registry, const NormalizationScope& scope,
            const std::vector<const Service*>& cls, const QoSVector& candidate,
            const QoSVector& incumbent, const std::vector<std::size_t>& violated);

// Candidate replacement for the incumbent member `incumbent` (a position in
// `members`). A candidate must stay within the relaxed incumbent value on
// every satisfied parameter and be no worse on every violated one; the
// highest gain wins, the incumbent keeps its place on a tie, and remaining
// ties go to the smallest id. nullopt means no change.
std::optional<std::size_t> update_qos(
    const QoSRegistry& registry, const NormalizationScope& scope,
    const std::vector<const Service*>& members, std::size_t incumbent,
    const RefinementContext& context,
    const std::function<bool(const Service&)>& admissible = {});

struct TraceEntry {
  int level = 0;
  std::string node;
  std::string action;  // swap, drop, remove, skip, reject
  std::string chosen;
  std::map<std::string, double> laxity_before;
  std::map<std::string, double> laxity_after;
};

std::string to_text(const std::vector<TraceEntry>& trace);

struct RefineResult {
  bool success = false;
  Solution refined;    // same level as the input
  Solution expressed;  // one level down, valid when success
  std::vector<TraceEntry> trace;
};

// One QoS-refinement pass over the multi-member nodes of `solution`,
// largest member sets first. Level 1 swaps the chosen member, level 2 also
// requires the new member to fit the node's position, level 3 drops members
// whose outputs are not consumed, level 4 keeps only the fused services the
// node's consumers need. Stops as soon as every bound holds.
RefineResult refine_qos(const AbstractionHierarchy& h, const Solution& solution,
                        const Constraints& bounds);

// Replaces every node by its expansion at the level below and rewires.
// Throws IntegrityError when an expansion does not exist.
Solution express_one_level_down(const AbstractionHierarchy& h,
                                const Solution& solution);

// Expresses a solution of any level over concrete services.
Solution reconstruct(const AbstractionHierarchy& h, const Solution& solution);

struct CompleteRefinement {
  bool satisfied = false;
  bool feasible = false;
  int level = 0;           // level the answer was found at
  Solution solution;       // at `level`
  Solution concrete;
  bool truncated = false;
};

// Rebuilds the graph at every level below `level`, down to 0, re-running
// the constrained search until a solution meets every bound.
CompleteRefinement complete_refinement(const AbstractionHierarchy& h, int level,
                                       const Query& query,
                                       const SearchOptions& search = {});

enum class Status { kSatisfied, kUnsatisfiable, kInfeasible };
std::string to_string(Status s);

struct OrchestrateOptions {
  int start_level = kTopLevel;
  // Unbounded queries optimize this parameter; otherwise any solution.
  std::optional<std::size_t> objective;
  SearchOptions search;
  // Graph to use at the start level instead of building one.
  const DependencyGraph* start_graph = nullptr;
};

struct Outcome {
  Status status = Status::kInfeasible;
  Solution concrete;   // level 0; least violating when unsatisfiable
  Solution answered;   // the abstract solution the answer came from
  int answered_level = -1;
  std::size_t qos_refinement_passes = 0;
  std::size_t complete_refinements = 0;
  std::vector<TraceEntry> trace;
  std::vector<std::size_t> violated;
  bool truncated = false;
};

// Compose at the start level; on a violated bound try QoS refinement, and
// failing that descend one level at a time down to the concrete services.
Outcome orchestrate(const AbstractionHierarchy& h, const Query& query,
                    const OrchestrateOptions& options = {});

}  // namespace qosar

#endif  // QOSAR_REFINE_HPP_
