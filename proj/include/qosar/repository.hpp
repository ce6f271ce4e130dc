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

#ifndef QOSAR_REPOSITORY_HPP_
#define QOSAR_REPOSITORY_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qosar/concept_set.hpp"
#include "qosar/qos.hpp"

namespace qosar {

struct Concept {
  std::string id;
  // Raw parameter names mapped to this concept. The id itself always
  // resolves too and is not repeated here.
  std::vector<std::string> aliases;
};

class Ontology {
 public:
  // Throws ValidationError when the id or an alias is already taken.
  ConceptId add(std::string id, std::vector<std::string> aliases = {});
  // Returns the existing concept with this id or adds a new one.
  ConceptId ensure(const std::string& id);

  // Throws ResolutionError for unknown names.
  ConceptId resolve(std::string_view name) const;
  std::optional<ConceptId> find(std::string_view name) const;
  ConceptSet resolve_all(const std::vector<std::string>& names) const;

  std::size_t size() const { return concepts_.size(); }
  const Concept& operator[](ConceptId c) const { return concepts_[c]; }
  const std::string& name(ConceptId c) const { return concepts_[c].id; }
  const std::vector<Concept>& concepts() const { return concepts_; }

 private:
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, ConceptId> lookup_;
};

struct Service {
  std::string id;
  ConceptSet inputs;
  ConceptSet outputs;
  QoSVector qos;
};

struct Repository {
  Ontology ontology;
  QoSRegistry registry;
  std::vector<Service> services;

  std::optional<std::size_t> find_service(std::string_view id) const;
};

struct Query {
  std::string id;
  ConceptSet inputs;
  ConceptSet outputs;
  Constraints constraints;
};

// Checks every structural invariant; throws ValidationError on the first
// violation found.
void validate(const Repository& repo);
void validate(const Query& query, const Repository& repo);

// Service ids and concept ids share the same lexical rules so that they can
// be written in the canonical text format without quoting.
bool is_valid_identifier(std::string_view s);

// Canonical text format.
Repository parse_repository(std::string_view text);
Repository load_repository(const std::filesystem::path& path);
std::string format_repository(const Repository& repo);
void save_repository(const Repository& repo, const std::filesystem::path& path);

Query parse_query(std::string_view text, const Repository& repo);
Query load_query(const std::filesystem::path& path, const Repository& repo);
std::string format_query(const Query& query, const Repository& repo);

// `name=value, name=value` over registered parameters.
Constraints parse_bounds(std::string_view text, const QoSRegistry& registry);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace qosar

#endif  // QOSAR_REPOSITORY_HPP_
