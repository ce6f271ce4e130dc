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

#include "qosar/qos.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <system_error>

#include "qosar/error.hpp"

namespace qosar {

namespace {

bool supported_pair(const QoSParamSpec& p) {
  if (p.is_path()) return !p.positive();
  if (p.sequential != p.parallel) return false;
  switch (p.sequential) {
    case Aggregation::kSum:
    case Aggregation::kCount:
      return !p.positive();
    case Aggregation::kProduct:
      return p.positive();
    case Aggregation::kMin:
      return p.positive();
    case Aggregation::kMax:
      return !p.positive();
  }
  return false;
}

}  // namespace

bool operator==(const QoSParamSpec& a, const QoSParamSpec& b) {
  return a.name == b.name && a.monotonicity == b.monotonicity &&
         a.sequential == b.sequential && a.parallel == b.parallel &&
         a.laxity == b.laxity;
}

QoSRegistry::QoSRegistry(std::vector<QoSParamSpec> params)
    : params_(std::move(params)) {
  std::set<std::string> seen;
  for (const auto& p : params_) {
    if (p.name.empty()) throw ConfigError("QoS parameter with empty name");
    if (!seen.insert(p.name).second) {
      throw ConfigError("duplicate QoS parameter '" + p.name + "'");
    }
    if (!supported_pair(p)) {
      throw ConfigError("QoS parameter '" + p.name +
                        "': unsupported aggregation pair " +
                        to_string(p.sequential) + "/" + to_string(p.parallel) +
                        " for " + to_string(p.monotonicity) + " monotonicity");
    }
  }
}

QoSRegistry QoSRegistry::defaults() {
  using A = Aggregation;
  using M = Monotonicity;
  using L = LaxityKind;
  return QoSRegistry({
      {"response_time", M::kNegative, A::kSum, A::kMax, L::kAdditive},
      {"throughput", M::kPositive, A::kMin, A::kMin, L::kAdditive},
      {"reliability", M::kPositive, A::kProduct, A::kProduct,
       L::kMultiplicative},
      {"availability", M::kPositive, A::kProduct, A::kProduct,
       L::kMultiplicative},
      {"invocation_cost", M::kNegative, A::kSum, A::kSum, L::kAdditive},
      {"invocation_count", M::kNegative, A::kCount, A::kCount, L::kAdditive},
  });
}

std::optional<std::size_t> QoSRegistry::find(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t QoSRegistry::index(std::string_view name) const {
  auto i = find(name);
  if (!i) {
    throw ValidationError("unknown QoS parameter '" + std::string(name) + "'");
  }
  return *i;
}

std::optional<std::size_t> QoSRegistry::timing_param() const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].is_path()) return i;
  }
  return std::nullopt;
}

void QoSRegistry::check_value(std::size_t i, double value) const {
  const auto& p = params_.at(i);
  if (!std::isfinite(value)) {
    throw ValidationError("QoS '" + p.name + "' must be finite");
  }
  if (p.is_probability()) {
    if (!(value > 0.0 && value <= 1.0)) {
      throw ValidationError("QoS '" + p.name + "' = " + format_number(value) +
                            " outside (0, 1]");
    }
  } else if (value < 0.0) {
    throw ValidationError("QoS '" + p.name + "' = " + format_number(value) +
                          " is negative");
  }
}

void QoSRegistry::check_vector(const QoSVector& v) const {
  if (v.size() != params_.size()) {
    throw ValidationError("QoS vector has " + std::to_string(v.size()) +
                          " values, registry has " +
                          std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < v.size(); ++i) check_value(i, v[i]);
}

bool QoSRegistry::operator==(const QoSRegistry& other) const {
  return params_ == other.params_;
}

std::string to_string(Monotonicity m) {
  return m == Monotonicity::kPositive ? "positive" : "negative";
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::kSum:
      return "sum";
    case Aggregation::kMax:
      return "max";
    case Aggregation::kMin:
      return "min";
    case Aggregation::kProduct:
      return "product";
    case Aggregation::kCount:
      return "count";
  }
  return "?";
}

std::string to_string(LaxityKind k) {
  return k == LaxityKind::kAdditive ? "additive" : "multiplicative";
}

std::optional<Monotonicity> parse_monotonicity(std::string_view s) {
  if (s == "positive") return Monotonicity::kPositive;
  if (s == "negative") return Monotonicity::kNegative;
  return std::nullopt;
}

std::optional<Aggregation> parse_aggregation(std::string_view s) {
  if (s == "sum") return Aggregation::kSum;
  if (s == "max") return Aggregation::kMax;
  if (s == "min") return Aggregation::kMin;
  if (s == "product") return Aggregation::kProduct;
  if (s == "count") return Aggregation::kCount;
  return std::nullopt;
}

std::optional<LaxityKind> parse_laxity_kind(std::string_view s) {
  if (s == "additive") return LaxityKind::kAdditive;
  if (s == "multiplicative") return LaxityKind::kMultiplicative;
  return std::nullopt;
}

double fold_identity(Aggregation a) {
  switch (a) {
    case Aggregation::kSum:
    case Aggregation::kCount:
    case Aggregation::kMax:
      return 0.0;
    case Aggregation::kProduct:
      return 1.0;
    case Aggregation::kMin:
      return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double fold_step(Aggregation a, double acc, double value) {
  switch (a) {
    case Aggregation::kSum:
    case Aggregation::kCount:
      return acc + value;
    case Aggregation::kMax:
      return std::max(acc, value);
    case Aggregation::kMin:
      return std::min(acc, value);
    case Aggregation::kProduct:
      return acc * value;
  }
  return acc;
}

double fold_all(Aggregation a, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double acc = fold_identity(a);
  for (double v : values) acc = fold_step(a, acc, v);
  return acc;
}

QoSVector parallel_aggregate(const QoSRegistry& reg,
                             const std::vector<const QoSVector*>& members) {
  QoSVector out(reg.size());
  for (std::size_t q = 0; q < reg.size(); ++q) {
    std::vector<double> values;
    for (const QoSVector* m : members) values.push_back((*m)[q]);
    out[q] = fold_all(reg[q].parallel, std::move(values));
  }
  return out;
}

bool satisfies(const QoSParamSpec& spec, double achieved, double bound) {
  const double tol = 1e-9 * std::max(1.0, std::fabs(bound));
  return spec.positive() ? achieved >= bound - tol : achieved <= bound + tol;
}

std::vector<std::size_t> violated_params(const QoSRegistry& reg,
                                         const QoSVector& qos,
                                         const Constraints& bounds) {
  std::vector<std::size_t> out;
  for (const auto& [q, bound] : bounds) {
    if (!satisfies(reg[q], qos[q], bound)) out.push_back(q);
  }
  return out;
}

bool satisfies_all(const QoSRegistry& reg, const QoSVector& qos,
                   const Constraints& bounds) {
  for (const auto& [q, bound] : bounds) {
    if (!satisfies(reg[q], qos[q], bound)) return false;
  }
  return true;
}

double normalized_violation(const QoSParamSpec& spec, double achieved,
                            double bound) {
  if (satisfies(spec, achieved, bound)) return 0.0;
  const double scale = std::max(std::fabs(bound), 1e-12);
  return std::fabs(achieved - bound) / scale;
}

double normalize(double value, const QoSParamSpec& spec, double min,
                 double max) {
  if (min > max) throw ContractError("normalize: min > max");
  const double tol = 1e-12 * std::max(1.0, std::fabs(max));
  if (value < min - tol || value > max + tol) {
    throw ContractError("normalize: " + spec.name + " value " +
                        format_number(value) + " outside [" +
                        format_number(min) + ", " + format_number(max) + "]");
  }
  if (max == min) return 1.0;
  const double nv =
      spec.positive() ? (value - min) / (max - min) : (max - value) / (max - min);
  return std::clamp(nv, 0.0, 1.0);
}

double deviation(double nv) { return 1.0 - nv; }

std::pair<double, double> NormalizationScope::range(
    std::size_t q, const std::vector<double>& values) const {
  if (fixed(q)) return *extremes[q];
  if (values.empty()) return {0.0, 0.0};
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace qosar
