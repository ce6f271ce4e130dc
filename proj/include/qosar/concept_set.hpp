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

#ifndef QOSAR_CONCEPT_SET_HPP_
#define QOSAR_CONCEPT_SET_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

namespace qosar {

using ConceptId = std::uint32_t;

// Sorted, duplicate-free vector of concept ids. All helpers below assume the
// sorted form; `normalize` establishes it.
using ConceptSet = std::vector<ConceptId>;

inline void normalize(ConceptSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline ConceptSet make_set(std::vector<ConceptId> v) {
  normalize(v);
  return v;
}

inline bool contains(const ConceptSet& s, ConceptId c) {
  return std::binary_search(s.begin(), s.end(), c);
}

inline bool is_subset(const ConceptSet& a, const ConceptSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline ConceptSet set_union(const ConceptSet& a, const ConceptSet& b) {
  ConceptSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline ConceptSet set_difference(const ConceptSet& a, const ConceptSet& b) {
  ConceptSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline ConceptSet set_intersection(const ConceptSet& a, const ConceptSet& b) {
  ConceptSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline bool intersects(const ConceptSet& a, const ConceptSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

inline void insert_all(ConceptSet& into, const ConceptSet& from) {
  into = set_union(into, from);
}

}  // namespace qosar

#endif  // QOSAR_CONCEPT_SET_HPP_
