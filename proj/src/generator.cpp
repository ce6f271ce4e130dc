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

#include "qosar/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "qosar/error.hpp"
#include "text_util.hpp"

namespace qosar {

namespace {

struct ConfigField {
  const char* key;
  std::size_t GeneratorConfig::*count = nullptr;
  double GeneratorConfig::*real = nullptr;
};

const std::vector<ConfigField>& config_fields() {
  using G = GeneratorConfig;
  static const std::vector<ConfigField> fields = {
      {"categories", &G::categories},
      {"subcategories_min", &G::subcategories_min},
      {"subcategories_max", &G::subcategories_max},
      {"services_min", &G::services_min},
      {"services_max", &G::services_max},
      {"max_parents", &G::max_parents},
      {"external_inputs", &G::external_inputs},
      {"outputs_per_category", &G::outputs_per_category},
      {"rt_mean", nullptr, &G::rt_mean},
      {"rt_sd", nullptr, &G::rt_sd},
      {"throughput_min", nullptr, &G::throughput_min},
      {"throughput_max", nullptr, &G::throughput_max},
      {"reliability_min", nullptr, &G::reliability_min},
      {"reliability_max", nullptr, &G::reliability_max},
      {"availability_min", nullptr, &G::availability_min},
      {"availability_max", nullptr, &G::availability_max},
      {"cost_min", nullptr, &G::cost_min},
      {"cost_max", nullptr, &G::cost_max},
  };
  return fields;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) {
    s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  }
  return s;
}

}  // namespace

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (categories == 0) fail("categories must be positive");
  if (subcategories_min == 0 || subcategories_min > subcategories_max) {
    fail("need 1 <= subcategories_min <= subcategories_max");
  }
  if (subcategories_max > 5) fail("at most 5 sub-categories per category");
  if (services_min == 0 || services_min > services_max) {
    fail("need 1 <= services_min <= services_max");
  }
  if (external_inputs == 0) fail("external_inputs must be positive");
  if (outputs_per_category < 2) fail("outputs_per_category must be >= 2");
  if (!(rt_mean > 0.0) || rt_sd < 0.0) fail("need rt_mean > 0 and rt_sd >= 0");
  if (throughput_min < 0.0 || throughput_min > throughput_max) {
    fail("bad throughput range");
  }
  auto prob = [&](double lo, double hi, const char* what) {
    if (!(lo > 0.0) || lo > hi || hi > 1.0) {
      fail(std::string("bad ") + what + " range, need 0 < min <= max <= 1");
    }
  };
  prob(reliability_min, reliability_max, "reliability");
  prob(availability_min, availability_max, "availability");
  if (cost_min < 0.0 || cost_min > cost_max) fail("bad cost range");
}

GeneratorConfig GeneratorConfig::parse(std::string_view text) {
  GeneratorConfig cfg;
  std::size_t line_no = 0;
  for (const auto& raw : text::lines(text)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected key=value");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    const auto& fields = config_fields();
    auto it = std::find_if(fields.begin(), fields.end(),
                           [&](const ConfigField& f) { return key == f.key; });
    if (it == fields.end()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown generator key '" + std::string(key) + "'");
    }
    auto num = parse_number(value);
    if (!num || !std::isfinite(*num)) {
      throw ParseError(line_no, "bad number '" + std::string(value) + "'");
    }
    if (it->count != nullptr) {
      if (*num < 0 || std::floor(*num) != *num) {
        throw ParseError(line_no, std::string(key) + " must be a whole number");
      }
      cfg.*(it->count) = static_cast<std::size_t>(*num);
    } else {
      cfg.*(it->real) = *num;
    }
  }
  cfg.validate();
  return cfg;
}

std::string GeneratorConfig::format() const {
  std::ostringstream out;
  for (const auto& f : config_fields()) {
    out << f.key << '=';
    if (f.count != nullptr) {
      out << this->*(f.count);
    } else {
      out << format_number(this->*(f.real));
    }
    out << "\n";
  }
  return out.str();
}

Repository generate_synthetic(const GeneratorConfig& config,
                              std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto uniform_real = [&](double lo, double hi) {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  Repository repo;
  repo.registry = QoSRegistry::defaults();
  const int cw = config.categories >= 100 ? 3 : 2;

  struct Category {
    std::vector<ConceptId> outputs;
    ConceptSet base_inputs;
    ConceptId optional_input;
    ConceptId alternate_output;
    ConceptId alternate_input;
    ConceptId first_external;
  };
  std::vector<Category> cats(config.categories);

  for (std::size_t k = 0; k < config.categories; ++k) {
    const std::string tag = "c" + padded(k, cw);
    Category& cat = cats[k];
    for (std::size_t j = 0; j < config.outputs_per_category; ++j) {
      cat.outputs.push_back(repo.ontology.add(tag + "_out" + std::to_string(j)));
    }
    cat.alternate_output = repo.ontology.add(tag + "_alt");
    for (std::size_t j = 0; j < config.external_inputs; ++j) {
      cat.base_inputs.push_back(
          repo.ontology.add(tag + "_ext" + std::to_string(j)));
    }
    cat.first_external = cat.base_inputs.front();
    cat.optional_input = repo.ontology.add(tag + "_opt");
    cat.alternate_input = repo.ontology.add(tag + "_ext_alt");
    if (k > 0 && config.max_parents > 0) {
      const std::size_t lo = 1;
      const std::size_t hi = std::min(config.max_parents, k);
      const std::size_t np = uniform_int(lo, hi);
      std::vector<std::size_t> pool(k);
      for (std::size_t p = 0; p < k; ++p) pool[p] = p;
      std::shuffle(pool.begin(), pool.end(), rng);
      for (std::size_t p = 0; p < np; ++p) {
        const auto& parent = cats[pool[p]];
        cat.base_inputs.push_back(
            parent.outputs[uniform_int(0, parent.outputs.size() - 1)]);
      }
    }
    normalize(cat.base_inputs);
  }

  const auto rt_idx = repo.registry.index("response_time");
  const auto tp_idx = repo.registry.index("throughput");
  const auto rel_idx = repo.registry.index("reliability");
  const auto av_idx = repo.registry.index("availability");
  const auto cost_idx = repo.registry.index("invocation_cost");
  const auto cnt_idx = repo.registry.index("invocation_count");
  std::normal_distribution<double> rt_dist(config.rt_mean, config.rt_sd);

  for (std::size_t k = 0; k < config.categories; ++k) {
    const Category& cat = cats[k];
    const ConceptSet all_out = make_set(cat.outputs);
    ConceptSet with_opt = cat.base_inputs;
    with_opt.push_back(cat.optional_input);
    normalize(with_opt);
    ConceptSet swapped = cat.base_inputs;
    // Replace the category's first external input with its alternate.
    std::replace(swapped.begin(), swapped.end(), cat.first_external,
                 cat.alternate_input);
    normalize(swapped);

    // Variant 0 is the plain task; 1 and 3 need an extra input (dominated by
    // 0), 2 trades an output for an alternate one (same inputs as 0), and 4
    // accepts an alternate external input.
    std::vector<std::pair<ConceptSet, ConceptSet>> variants = {
        {cat.base_inputs, all_out},
        {with_opt, all_out},
        {cat.base_inputs,
         make_set({cat.outputs[0], cat.outputs[1], cat.alternate_output})},
        {with_opt, ConceptSet{cat.outputs[0]}},
        {swapped, all_out},
    };
    std::vector<std::size_t> order = {1, 2, 3, 4};
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t nsub =
        uniform_int(config.subcategories_min, config.subcategories_max);
    std::vector<std::size_t> chosen = {0};
    for (std::size_t i = 0; i + 1 < nsub; ++i) chosen.push_back(order[i]);
    std::sort(chosen.begin(), chosen.end());

    for (std::size_t v = 0; v < chosen.size(); ++v) {
      const auto& [in, out] = variants[chosen[v]];
      const std::size_t ns =
          uniform_int(config.services_min, config.services_max);
      for (std::size_t i = 0; i < ns; ++i) {
        Service s;
        s.id = "C" + padded(k, cw) + "." + std::to_string(v + 1) + "." +
               padded(i + 1, 3);
        s.inputs = in;
        s.outputs = out;
        s.qos.assign(repo.registry.size(), 0.0);
        s.qos[rt_idx] = round_to(std::max(1.0, rt_dist(rng)), 0.1);
        s.qos[tp_idx] = round_to(
            uniform_real(config.throughput_min, config.throughput_max), 0.1);
        s.qos[rel_idx] = std::clamp(
            round_to(uniform_real(config.reliability_min,
                                  config.reliability_max),
                     1e-4),
            1e-4, 1.0);
        s.qos[av_idx] = std::clamp(
            round_to(uniform_real(config.availability_min,
                                  config.availability_max),
                     1e-4),
            1e-4, 1.0);
        s.qos[cost_idx] =
            round_to(uniform_real(config.cost_min, config.cost_max), 0.01);
        s.qos[cnt_idx] = 1.0;
        repo.services.push_back(std::move(s));
      }
    }
  }
  validate(repo);
  return repo;
}

std::vector<Query> generate_queries(const Repository& repo, std::size_t count,
                                    std::uint64_t seed,
                                    const QueryGenOptions& options) {
  std::vector<Query> out;
  if (count == 0) return out;
  std::mt19937_64 rng(seed);

  ConceptSet produced, consumed;
  for (const auto& s : repo.services) {
    produced.insert(produced.end(), s.outputs.begin(), s.outputs.end());
    consumed.insert(consumed.end(), s.inputs.begin(), s.inputs.end());
  }
  normalize(produced);
  normalize(consumed);
  const ConceptSet sources = set_difference(consumed, produced);
  if (sources.empty()) return out;

  for (std::size_t attempt = 0;
       attempt < options.max_attempts && out.size() < count; ++attempt) {
    ConceptSet inputs;
    for (ConceptId c : sources) {
      if (options.input_fraction >= 1.0 ||
          std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
              options.input_fraction) {
        inputs.push_back(c);
      }
    }
    if (inputs.empty()) continue;

    // Forward chaining in waves; remember the wave each concept appears in.
    std::map<ConceptId, std::size_t> wave_of;
    for (ConceptId c : inputs) wave_of[c] = 0;
    std::vector<bool> active(repo.services.size(), false);
    for (std::size_t wave = 1;; ++wave) {
      std::vector<std::size_t> fired;
      for (std::size_t i = 0; i < repo.services.size(); ++i) {
        if (active[i]) continue;
        const auto& s = repo.services[i];
        bool ok = std::all_of(s.inputs.begin(), s.inputs.end(), [&](ConceptId c) {
          auto it = wave_of.find(c);
          return it != wave_of.end() && it->second < wave;
        });
        if (ok) fired.push_back(i);
      }
      if (fired.empty()) break;
      for (auto i : fired) {
        active[i] = true;
        for (ConceptId c : repo.services[i].outputs) wave_of.emplace(c, wave);
      }
    }
    std::vector<std::pair<std::size_t, ConceptId>> reachable;
    for (const auto& [c, w] : wave_of) {
      if (w > 0) reachable.push_back({w, c});
    }
    if (reachable.size() < options.outputs_min) continue;
    std::sort(reachable.begin(), reachable.end());
    // Prefer the deeper half so that queries exercise chains of services.
    const std::size_t from = reachable.size() / 2;
    std::vector<ConceptId> pool;
    for (std::size_t i = from; i < reachable.size(); ++i) {
      pool.push_back(reachable[i].second);
    }
    if (pool.size() < options.outputs_min) continue;
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t k = std::min(
        pool.size(), std::uniform_int_distribution<std::size_t>(
                         options.outputs_min, options.outputs_max)(rng));
    Query q;
    q.id = "q" + padded(out.size() + 1, 2);
    q.inputs = inputs;
    q.outputs = make_set(std::vector<ConceptId>(pool.begin(), pool.begin() + k));
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixtures.

namespace {

struct SubcategorySpec {
  const char* id;  // category.subcategory
  std::vector<const char*> inputs;
  std::vector<const char*> outputs;
  std::size_t services;
};

const std::vector<SubcategorySpec>& tour_layout() {
  static const std::vector<SubcategorySpec> layout = {
      {"AP.1", {"FromAirport", "ToAirport"}, {"AirportCodes"}, 3},
      {"FS.1",
       {"AirportCodes", "DepartureDate", "ReturnDate", "NoOfPersons", "Class",
        "FlightPreferenceCriteria"},
       {"FlightOffer"},
       5},
      {"FS.2",
       {"AirportCodes", "DepartureDate", "ReturnDate", "NoOfPersons", "Class",
        "FlightPreferenceCriteria", "Credential"},
       {"FlightOffer"},
       5},
      {"FP.1", {"FlightOffer", "Budget"}, {"FareQuote"}, 3},
      {"PG.1", {"Credential", "Budget"}, {"PaymentToken"}, 4},
      {"FB.1",
       {"FlightOffer", "PaymentToken", "FareQuote"},
       {"FlightTicket", "FlightItinerary"},
       6},
      {"HS.1",
       {"City", "ArrivalDate", "CheckOutDate", "NoOfRooms",
        "HotelPreferenceCriteria", "Credential"},
       {"HotelOffer", "HotelAddress"},
       5},
      {"HS.2",
       {"City", "ArrivalDate", "CheckOutDate", "NoOfRooms",
        "HotelPreferenceCriteria", "Credential", "Budget"},
       {"HotelOffer", "HotelAddress"},
       3},
      {"HR.1", {"HotelOffer", "Budget"}, {"HotelShortlist"}, 3},
      {"HB.1",
       {"HotelShortlist", "Credential", "NoOfRooms"},
       {"HotelBookingConfirmation"},
       5},
      {"LT.1", {"HotelAddress", "ArrivalDate"}, {"TransferSchedule"}, 2},
      {"AC.1",
       {"FlightItinerary", "HotelAddress", "TransferSchedule"},
       {"AirportCabBookingConfirmation"},
       4},
      {"AC.2",
       {"FlightItinerary", "HotelAddress", "TransferSchedule", "LoyaltyId"},
       {"AirportCabBookingConfirmation"},
       4},
      {"CC.1",
       {"HotelAddress", "VisitingPreferenceCriteria"},
       {"CityCabBookingConfirmation"},
       3},
      {"CC.2",
       {"HotelAddress", "VisitingPreferenceCriteria", "LoyaltyId"},
       {"CityCabBookingConfirmation"},
       3},
      {"WF.1", {"City"}, {"WeatherForecastReport"}, 4},
      {"RS.1", {"City"}, {"RestaurantName", "PhoneNumber", "RestaurantRating"}, 5},
      {"RS.2", {"City", "Cuisine"}, {"RestaurantName", "PhoneNumber"}, 4},
      {"SS.1", {"City"}, {"SightseeingSpots"}, 4},
      {"SS.2", {"City", "Budget"}, {"SightseeingSpots"}, 3},
      {"EM.1", {"City"}, {"EventList"}, 4},
      {"EM.2", {"City", "VisitingPreferenceCriteria"}, {"EventList"}, 3},
      {"CR.1", {"City", "Budget"}, {"LocalCurrencyBudget"}, 4},
      {"TI.1", {"City", "NoOfPersons"}, {"InsurancePolicy"}, 4},
      {"MP.1", {"City", "VisitingPreferenceCriteria"}, {"CityMap"}, 3},
      {"TG.1", {"City", "DepartureDate"}, {"TourGuideBooking"}, 3},
  };
  return layout;
}

// Concept ids with the raw parameter names a provider might use for them.
const std::vector<std::pair<const char*, std::vector<std::string>>>&
tour_concepts() {
  static const std::vector<std::pair<const char*, std::vector<std::string>>>
      concepts = {
          {"FromAirport", {"from", "fromAirport", "origin"}},
          {"ToAirport", {"to", "toAirport", "destinationAirport"}},
          {"DepartureDate", {"departureDate", "onwardDate"}},
          {"ReturnDate", {"returnDate"}},
          {"NoOfPersons", {"persons", "travellers"}},
          {"Class", {"class", "cabinClass"}},
          {"FlightPreferenceCriteria", {"flightPreference"}},
          {"Credential", {"credential", "login"}},
          {"ArrivalDate", {"arrivalDate", "checkInDate"}},
          {"CheckOutDate", {"checkOutDate"}},
          {"NoOfRooms", {"rooms"}},
          {"City", {"city", "location"}},
          {"Budget", {"budget"}},
          {"HotelPreferenceCriteria", {"hotelPreference"}},
          {"VisitingPreferenceCriteria", {"visitingPreference"}},
          {"Cuisine", {"cuisine"}},
          {"AirportCodes", {}},
          {"FlightOffer", {}},
          {"FareQuote", {}},
          {"PaymentToken", {}},
          {"FlightTicket", {"ticket"}},
          {"FlightItinerary", {"itinerary"}},
          {"HotelOffer", {}},
          {"HotelAddress", {}},
          {"HotelShortlist", {}},
          {"HotelBookingConfirmation", {}},
          {"TransferSchedule", {}},
          {"LoyaltyId", {}},
          {"AirportCabBookingConfirmation", {}},
          {"CityCabBookingConfirmation", {}},
          {"WeatherForecastReport", {"weather"}},
          {"RestaurantName", {"restaurantName"}},
          {"PhoneNumber", {"phoneNumber"}},
          {"RestaurantRating", {"rating"}},
          {"SightseeingSpots", {}},
          {"EventList", {}},
          {"LocalCurrencyBudget", {}},
          {"InsurancePolicy", {}},
          {"CityMap", {}},
          {"TourGuideBooking", {}},
      };
  return concepts;
}

ConceptSet resolve_names(const Ontology& o, const std::vector<const char*>& n) {
  ConceptSet out;
  for (const char* name : n) out.push_back(o.resolve(name));
  normalize(out);
  return out;
}

}  // namespace

Repository tour_planning_repository() {
  Repository repo;
  repo.registry = QoSRegistry::defaults();
  for (const auto& [id, aliases] : tour_concepts()) {
    repo.ontology.add(id, aliases);
  }
  std::mt19937_64 rng(20160901);
  auto pick = [&](int lo, int hi) {
    return static_cast<double>(std::uniform_int_distribution<int>(lo, hi)(rng));
  };
  for (const auto& sub : tour_layout()) {
    const ConceptSet in = resolve_names(repo.ontology, sub.inputs);
    const ConceptSet out = resolve_names(repo.ontology, sub.outputs);
    for (std::size_t i = 0; i < sub.services; ++i) {
      Service s;
      s.id = std::string(sub.id) + "." + padded(i + 1, 2);
      s.inputs = in;
      s.outputs = out;
      s.qos = {
          pick(20, 300),            // response_time, ms
          pick(10, 120),            // throughput
          pick(900, 999) / 1000.0,  // reliability
          pick(900, 999) / 1000.0,  // availability
          pick(1, 40) / 10.0,       // invocation_cost
          1.0,                      // invocation_count
      };
      repo.services.push_back(std::move(s));
    }
  }
  validate(repo);
  return repo;
}

Query tour_planning_query(const Repository& repo) {
  Query q;
  q.id = "tour";
  q.inputs = resolve_names(
      repo.ontology,
      {"FromAirport", "ToAirport", "DepartureDate", "ReturnDate", "NoOfPersons",
       "Class", "FlightPreferenceCriteria", "Credential", "ArrivalDate",
       "CheckOutDate", "NoOfRooms", "City", "Budget", "HotelPreferenceCriteria",
       "VisitingPreferenceCriteria", "Cuisine"});
  q.outputs = resolve_names(
      repo.ontology,
      {"FlightTicket", "HotelBookingConfirmation",
       "AirportCabBookingConfirmation", "CityCabBookingConfirmation",
       "WeatherForecastReport", "RestaurantName", "PhoneNumber"});
  validate(q, repo);
  return q;
}

ExampleFixture example_fixture(int which) {
  if (which < 4 || which > 6) {
    throw ContractError("example fixture must be 4, 5 or 6");
  }
  using A = Aggregation;
  using M = Monotonicity;
  using L = LaxityKind;
  ExampleFixture fx;
  Repository& repo = fx.repository;
  repo.registry = QoSRegistry({
      {"response_time", M::kNegative, A::kSum, A::kMax, L::kAdditive},
      {"throughput", M::kPositive, A::kMin, A::kMin, L::kAdditive},
      {"invocation_cost", M::kNegative, A::kSum, A::kSum, L::kAdditive},
  });
  const ConceptId q = repo.ontology.add("q");
  const ConceptId x = repo.ontology.add("x");
  const ConceptId y = repo.ontology.add("y");
  const bool alternatives = which == 6;
  ConceptSet second_out{y};
  ConceptSet third_out;
  if (alternatives) {
    second_out = make_set({y, repo.ontology.add("a")});
    third_out = make_set({y, repo.ontology.add("b")});
  }
  auto add = [&](const char* id, ConceptSet in, ConceptSet out, double rt,
                 double tp, double cost) {
    repo.services.push_back({id, std::move(in), std::move(out), {rt, tp, cost}});
  };
  add("S1", {q}, {x}, 120, 50, 10);
  add("S2", {q}, {x}, 75, 75, 25);
  add("S3", {q}, {x}, 125, 100, 20);
  add("S4", {x}, second_out, 75, 50, 20);
  add("S5", {x}, second_out, 150, 50, 10);
  add("S6", {x}, second_out, 175, 50, 10);
  if (alternatives) {
    add("S7", {x}, third_out, 175, 50, 10);
    add("S8", {x}, third_out, 50, 45, 15);
  }
  validate(repo);

  fx.query.id = "example" + std::to_string(which);
  fx.query.inputs = {q};
  fx.query.outputs = {y};
  if (which == 5) fx.query.constraints = {{0, 200}, {1, 50}, {2, 50}};
  if (which == 6) fx.query.constraints = {{0, 125}, {1, 50}, {2, 50}};
  validate(fx.query, repo);

  fx.scope.extremes = {std::pair{0.0, 200.0}, std::pair{45.0, 100.0},
                       std::pair{0.0, 25.0}};
  return fx;
}

}  // namespace qosar
