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

#include "qosar/repository.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qosar/error.hpp"
#include "format_util.hpp"
#include "text_util.hpp"

namespace qosar {

ConceptId Ontology::add(std::string id, std::vector<std::string> aliases) {
  if (!is_valid_identifier(id)) {
    throw ValidationError("invalid concept id '" + id + "'");
  }
  const auto cid = static_cast<ConceptId>(concepts_.size());
  std::vector<std::string> names{id};
  names.insert(names.end(), aliases.begin(), aliases.end());
  std::set<std::string> local;
  for (const auto& n : names) {
    if (!is_valid_identifier(n)) {
      throw ValidationError("invalid alias '" + n + "' for concept '" + id +
                            "'");
    }
    if (lookup_.count(n) != 0) {
      throw ValidationError("alias '" + n + "' of concept '" + id +
                            "' already belongs to concept '" +
                            concepts_[lookup_.at(n)].id + "'");
    }
    local.insert(n);
  }
  for (const auto& n : local) lookup_.emplace(n, cid);
  std::vector<std::string> kept;
  for (auto& a : aliases) {
    if (a != id && std::find(kept.begin(), kept.end(), a) == kept.end()) {
      kept.push_back(std::move(a));
    }
  }
  concepts_.push_back({std::move(id), std::move(kept)});
  return cid;
}

ConceptId Ontology::ensure(const std::string& id) {
  if (auto c = find(id)) return *c;
  return add(id);
}

std::optional<ConceptId> Ontology::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

ConceptId Ontology::resolve(std::string_view name) const {
  if (auto c = find(name)) return *c;
  throw ResolutionError("unknown concept alias '" + std::string(name) + "'");
}

ConceptSet Ontology::resolve_all(const std::vector<std::string>& names) const {
  ConceptSet out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(resolve(n));
  normalize(out);
  return out;
}

std::optional<std::size_t> Repository::find_service(std::string_view id) const {
  for (std::size_t i = 0; i < services.size(); ++i) {
    if (services[i].id == id) return i;
  }
  return std::nullopt;
}

bool is_valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (static_cast<unsigned char>(ch) <= ' ') return false;
    switch (ch) {
      case '|':
      case ',':
      case ':':
      case '=':
      case '#':
      case '[':
      case ']':
        return false;
      default:
        break;
    }
  }
  return true;
}

namespace {

void check_concepts(const ConceptSet& s, const Ontology& o,
                    const std::string& what) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= o.size()) {
      throw ValidationError(what + " refers to unknown concept #" +
                            std::to_string(s[i]));
    }
    if (i > 0 && s[i - 1] >= s[i]) {
      throw ValidationError(what + " concept set is not sorted/unique");
    }
  }
}

}  // namespace

void validate(const Repository& repo) {
  std::set<std::string> ids;
  for (const auto& s : repo.services) {
    if (!is_valid_identifier(s.id)) {
      throw ValidationError("invalid service id '" + s.id + "'");
    }
    if (!ids.insert(s.id).second) {
      throw ValidationError("duplicate service id '" + s.id + "'");
    }
    if (s.inputs.empty()) {
      throw ValidationError("service '" + s.id + "' has no inputs");
    }
    if (s.outputs.empty()) {
      throw ValidationError("service '" + s.id + "' has no outputs");
    }
    check_concepts(s.inputs, repo.ontology, "service '" + s.id + "' inputs");
    check_concepts(s.outputs, repo.ontology, "service '" + s.id + "' outputs");
    try {
      repo.registry.check_vector(s.qos);
    } catch (const ValidationError& e) {
      throw ValidationError("service '" + s.id + "': " + e.what());
    }
  }
}

void validate(const Query& query, const Repository& repo) {
  if (query.outputs.empty()) throw ValidationError("query has no outputs");
  check_concepts(query.inputs, repo.ontology, "query inputs");
  check_concepts(query.outputs, repo.ontology, "query outputs");
  for (const auto& [q, bound] : query.constraints) {
    if (q >= repo.registry.size()) {
      throw ValidationError("bound on unregistered parameter #" +
                            std::to_string(q));
    }
    try {
      repo.registry.check_value(q, bound);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("bound: ") + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Text format.

namespace {

enum class Section { kNone, kConcepts, kQoS, kServices };

QoSParamSpec parse_qos_line(const std::vector<std::string>& tok,
                            std::size_t line) {
  if (tok.size() != 5) {
    throw ParseError(line,
                     "expected 'name monotonicity seq-agg par-agg laxity-kind'");
  }
  QoSParamSpec p;
  p.name = tok[0];
  auto m = parse_monotonicity(tok[1]);
  auto s = parse_aggregation(tok[2]);
  auto par = parse_aggregation(tok[3]);
  auto l = parse_laxity_kind(tok[4]);
  if (!m) throw ParseError(line, "bad monotonicity '" + tok[1] + "'");
  if (!s) throw ParseError(line, "bad sequential aggregation '" + tok[2] + "'");
  if (!par) throw ParseError(line, "bad parallel aggregation '" + tok[3] + "'");
  if (!l) throw ParseError(line, "bad laxity kind '" + tok[4] + "'");
  p.monotonicity = *m;
  p.sequential = *s;
  p.parallel = *par;
  p.laxity = *l;
  return p;
}

}  // namespace

namespace detail {

QoSVector parse_qos_values(std::string_view text, const QoSRegistry& reg,
                           std::size_t line) {
  QoSVector v(reg.size(), 0.0);
  std::vector<bool> seen(reg.size(), false);
  for (const auto& item : text::split(text, ',')) {
    const auto kv = text::trim(item);
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line, "expected name=value in '" + std::string(kv) + "'");
    }
    const auto name = text::trim(kv.substr(0, eq));
    const auto val = text::trim(kv.substr(eq + 1));
    auto q = reg.find(name);
    if (!q) {
      throw ParseError(line, "unknown QoS parameter '" + std::string(name) + "'");
    }
    if (seen[*q]) {
      throw ParseError(line, "QoS parameter '" + std::string(name) +
                                 "' given twice");
    }
    auto num = parse_number(val);
    if (!num) throw ParseError(line, "bad number '" + std::string(val) + "'");
    v[*q] = *num;
    seen[*q] = true;
  }
  for (std::size_t q = 0; q < reg.size(); ++q) {
    if (!seen[q]) {
      throw ParseError(line, "missing QoS parameter '" + reg[q].name + "'");
    }
  }
  return v;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& item : text::split(text, ',')) {
    auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string join_concepts(const ConceptSet& s, const Ontology& o) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += ", ";
    out += o.name(s[i]);
  }
  return out;
}

}  // namespace detail

using detail::join_concepts;
using detail::parse_name_list;
using detail::parse_qos_values;

Repository parse_repository(std::string_view text) {
  Repository repo;
  Section section = Section::kNone;
  std::vector<QoSParamSpec> params;
  bool qos_seen = false;
  bool registry_frozen = false;
  std::set<std::string> ids;
  std::size_t line_no = 0;

  auto freeze_registry = [&](std::size_t line) {
    if (registry_frozen) return;
    try {
      repo.registry =
          qos_seen ? QoSRegistry(params) : QoSRegistry::defaults();
    } catch (const ConfigError& e) {
      throw ParseError(line, e.what());
    }
    registry_frozen = true;
  };

  for (const auto& raw : text::lines(text)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[concepts]") {
        section = Section::kConcepts;
      } else if (line == "[qos]") {
        if (registry_frozen) {
          throw ParseError(line_no, "[qos] must precede [services]");
        }
        section = Section::kQoS;
        qos_seen = true;
      } else if (line == "[services]") {
        section = Section::kServices;
        freeze_registry(line_no);
      } else {
        throw ParseError(line_no, "unknown section " + std::string(line));
      }
      continue;
    }
    switch (section) {
      case Section::kNone:
        throw ParseError(line_no, "record outside of any section");
      case Section::kConcepts: {
        const auto colon = line.find(':');
        const auto id = text::trim(line.substr(0, colon));
        std::vector<std::string> aliases;
        if (colon != std::string_view::npos) {
          aliases = parse_name_list(line.substr(colon + 1));
        }
        try {
          repo.ontology.add(std::string(id), aliases);
        } catch (const ValidationError& e) {
          throw ParseError(line_no, e.what());
        }
        break;
      }
      case Section::kQoS:
        params.push_back(parse_qos_line(text::split_ws(line), line_no));
        break;
      case Section::kServices: {
        const auto fields = text::split(line, '|');
        if (fields.size() != 4) {
          throw ParseError(line_no,
                           "expected 'id | in: ... | out: ... | qos: ...'");
        }
        Service s;
        s.id = std::string(text::trim(fields[0]));
        if (!is_valid_identifier(s.id)) {
          throw ParseError(line_no, "invalid service id '" + s.id + "'");
        }
        if (!ids.insert(s.id).second) {
          throw ParseError(line_no, "duplicate service id '" + s.id + "'");
        }
        bool have_in = false, have_out = false, have_qos = false;
        for (std::size_t f = 1; f < fields.size(); ++f) {
          const auto field = text::trim(fields[f]);
          const auto colon = field.find(':');
          if (colon == std::string_view::npos) {
            throw ParseError(line_no, "field without key: '" +
                                          std::string(field) + "'");
          }
          const auto key = text::trim(field.substr(0, colon));
          const auto value = field.substr(colon + 1);
          try {
            if (key == "in" && !have_in) {
              s.inputs = repo.ontology.resolve_all(parse_name_list(value));
              have_in = true;
            } else if (key == "out" && !have_out) {
              s.outputs = repo.ontology.resolve_all(parse_name_list(value));
              have_out = true;
            } else if (key == "qos" && !have_qos) {
              s.qos = parse_qos_values(value, repo.registry, line_no);
              have_qos = true;
            } else {
              throw ParseError(line_no, "unexpected field '" +
                                            std::string(key) + "'");
            }
          } catch (const ResolutionError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " +
                                  e.what());
          }
        }
        if (s.inputs.empty()) throw ParseError(line_no, "service has no inputs");
        if (s.outputs.empty()) {
          throw ParseError(line_no, "service has no outputs");
        }
        try {
          repo.registry.check_vector(s.qos);
        } catch (const ValidationError& e) {
          throw ValidationError("line " + std::to_string(line_no) + ": " +
                                e.what());
        }
        repo.services.push_back(std::move(s));
        break;
      }
    }
  }
  freeze_registry(line_no);
  validate(repo);
  return repo;
}

std::string format_repository(const Repository& repo) {
  std::ostringstream out;
  out << "[concepts]\n";
  for (const auto& c : repo.ontology.concepts()) {
    out << c.id << ":";
    for (std::size_t i = 0; i < c.aliases.size(); ++i) {
      out << (i == 0 ? " " : ", ") << c.aliases[i];
    }
    out << "\n";
  }
  out << "\n[qos]\n";
  for (const auto& p : repo.registry.params()) {
    out << p.name << ' ' << to_string(p.monotonicity) << ' '
        << to_string(p.sequential) << ' ' << to_string(p.parallel) << ' '
        << to_string(p.laxity) << "\n";
  }
  out << "\n[services]\n";
  for (const auto& s : repo.services) {
    out << s.id << " | in: " << join_concepts(s.inputs, repo.ontology)
        << " | out: " << join_concepts(s.outputs, repo.ontology) << " | qos: ";
    for (std::size_t q = 0; q < s.qos.size(); ++q) {
      if (q > 0) out << ", ";
      out << repo.registry[q].name << '=' << format_number(s.qos[q]);
    }
    out << "\n";
  }
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

Repository load_repository(const std::filesystem::path& path) {
  return parse_repository(read_text_file(path));
}

void save_repository(const Repository& repo, const std::filesystem::path& path) {
  write_text_file(path, format_repository(repo));
}

Constraints parse_bounds(std::string_view text, const QoSRegistry& registry) {
  Constraints out;
  for (const auto& item : text::split(text, ',')) {
    const auto kv = text::trim(item);
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("expected name=value in bound '" +
                            std::string(kv) + "'");
    }
    const auto q = registry.index(text::trim(kv.substr(0, eq)));
    auto v = parse_number(text::trim(kv.substr(eq + 1)));
    if (!v) throw ValidationError("bad bound value in '" + std::string(kv) + "'");
    registry.check_value(q, *v);
    out[q] = *v;
  }
  return out;
}

Query parse_query(std::string_view text, const Repository& repo) {
  Query q;
  std::size_t line_no = 0;
  bool have_out = false;
  for (const auto& raw : text::lines(text)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected 'key: value'");
    }
    const auto key = text::trim(line.substr(0, colon));
    const auto value = line.substr(colon + 1);
    try {
      if (key == "id") {
        q.id = std::string(text::trim(value));
      } else if (key == "in") {
        insert_all(q.inputs, repo.ontology.resolve_all(parse_name_list(value)));
      } else if (key == "out") {
        insert_all(q.outputs,
                   repo.ontology.resolve_all(parse_name_list(value)));
        have_out = true;
      } else if (key == "bound") {
        for (const auto& [p, v] : parse_bounds(value, repo.registry)) {
          q.constraints[p] = v;
        }
      } else {
        throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
      }
    } catch (const ResolutionError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  if (!have_out) throw ParseError(line_no, "query has no 'out:' line");
  validate(q, repo);
  return q;
}

Query load_query(const std::filesystem::path& path, const Repository& repo) {
  return parse_query(read_text_file(path), repo);
}

std::string format_query(const Query& query, const Repository& repo) {
  std::ostringstream out;
  if (!query.id.empty()) out << "id: " << query.id << "\n";
  out << "in: " << join_concepts(query.inputs, repo.ontology) << "\n";
  out << "out: " << join_concepts(query.outputs, repo.ontology) << "\n";
  for (const auto& [p, v] : query.constraints) {
    out << "bound: " << repo.registry[p].name << '=' << format_number(v)
        << "\n";
  }
  return out.str();
}

}  // namespace qosar
