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

#ifndef QOSAR_QOS_HPP_
#define QOSAR_QOS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qosar {

enum class Monotonicity { kPositive, kNegative };
enum class Aggregation { kSum, kMax, kMin, kProduct, kCount };
enum class LaxityKind { kAdditive, kMultiplicative };

struct QoSParamSpec {
  std::string name;
  Monotonicity monotonicity = Monotonicity::kNegative;
  Aggregation sequential = Aggregation::kSum;
  Aggregation parallel = Aggregation::kSum;
  LaxityKind laxity = LaxityKind::kAdditive;

  bool positive() const { return monotonicity == Monotonicity::kPositive; }

  // Time-like parameter: summed along a chain, max over parallel branches.
  // Its aggregate depends on the wiring, every other parameter is a fold.
  bool is_path() const {
    return sequential == Aggregation::kSum && parallel == Aggregation::kMax;
  }

  // Probability-like values must lie in (0, 1]; everything else is >= 0.
  bool is_probability() const {
    return laxity == LaxityKind::kMultiplicative ||
           sequential == Aggregation::kProduct;
  }

  bool strictly_better(double a, double b) const {
    return positive() ? a > b : a < b;
  }
  bool at_least_as_good(double a, double b) const {
    return positive() ? a >= b : a <= b;
  }
};

// One value per registered parameter, in registry order.
using QoSVector = std::vector<double>;

// Bound per parameter index; the worst value a solution may exhibit.
using Constraints = std::map<std::size_t, double>;

class QoSRegistry {
 public:
  QoSRegistry() = default;
  // Throws ConfigError on duplicate names or aggregation pairs the
  // composition engines cannot evaluate.
  explicit QoSRegistry(std::vector<QoSParamSpec> params);

  // response_time, throughput, reliability, availability, invocation_cost,
  // invocation_count.
  static QoSRegistry defaults();

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  const QoSParamSpec& operator[](std::size_t i) const { return params_[i]; }
  const std::vector<QoSParamSpec>& params() const { return params_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Like find, but throws ValidationError for unknown names.
  std::size_t index(std::string_view name) const;

  // First path parameter; drives the earliest-finish wiring.
  std::optional<std::size_t> timing_param() const;

  // Throws ValidationError when `value` lies outside the parameter domain.
  void check_value(std::size_t i, double value) const;
  void check_vector(const QoSVector& v) const;

  bool operator==(const QoSRegistry& other) const;

 private:
  std::vector<QoSParamSpec> params_;
};

bool operator==(const QoSParamSpec& a, const QoSParamSpec& b);

std::string to_string(Monotonicity m);
std::string to_string(Aggregation a);
std::string to_string(LaxityKind k);
std::optional<Monotonicity> parse_monotonicity(std::string_view s);
std::optional<Aggregation> parse_aggregation(std::string_view s);
std::optional<LaxityKind> parse_laxity_kind(std::string_view s);

double fold_identity(Aggregation a);
double fold_step(Aggregation a, double acc, double value);
// Folds in ascending order of value, so the result depends only on the
// multiset of values and not on the order they are listed in.
double fold_all(Aggregation a, std::vector<double> values);

// Combines member vectors with each parameter's parallel rule.
QoSVector parallel_aggregate(const QoSRegistry& reg,
                             const std::vector<const QoSVector*>& members);

// Tolerant bound check shared by every engine and oracle; equality counts as
// satisfied.
bool satisfies(const QoSParamSpec& spec, double achieved, double bound);
std::vector<std::size_t> violated_params(const QoSRegistry& reg,
                                         const QoSVector& qos,
                                         const Constraints& bounds);
bool satisfies_all(const QoSRegistry& reg, const QoSVector& qos,
                   const Constraints& bounds);
// |achieved - bound| / |bound| for a violated bound, 0 otherwise.
double normalized_violation(const QoSParamSpec& spec, double achieved,
                            double bound);

// Normalized value in [0,1]; 1 is the best value in [min, max] and also the
// result of a degenerate range. Throws ContractError outside the range.
double normalize(double value, const QoSParamSpec& spec, double min,
                 double max);
double deviation(double nv);

// Per-parameter normalization extremes. A missing entry means the extremes
// are taken over the set being scored (class-local scope).
struct NormalizationScope {
  std::vector<std::optional<std::pair<double, double>>> extremes;

  bool fixed(std::size_t q) const {
    return q < extremes.size() && extremes[q].has_value();
  }
  // Extremes for parameter q over `values` (or the fixed pair).
  std::pair<double, double> range(std::size_t q,
                                   const std::vector<double>& values) const;
};

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
std::optional<double> parse_number(std::string_view s);

}  // namespace qosar

#endif  // QOSAR_QOS_HPP_
