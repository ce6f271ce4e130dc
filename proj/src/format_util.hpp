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

#ifndef QOSAR_SRC_FORMAT_UTIL_HPP_
#define QOSAR_SRC_FORMAT_UTIL_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qosar/qos.hpp"
#include "qosar/repository.hpp"

namespace qosar::detail {

// `name=value, ...` covering every registered parameter exactly once.
QoSVector parse_qos_values(std::string_view text, const QoSRegistry& reg,
                           std::size_t line);

// Comma separated, blanks dropped.
std::vector<std::string> parse_name_list(std::string_view text);

std::string join_concepts(const ConceptSet& s, const Ontology& o);

}  // namespace qosar::detail

#endif  // QOSAR_SRC_FORMAT_UTIL_HPP_
