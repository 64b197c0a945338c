/*
 * Copyright 2026 The rulehound Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Typed tabular data: schema sidecars, CSV ingestion, seen/unseen splits.

#ifndef RULEHOUND_DATASET_HPP_
#define RULEHOUND_DATASET_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulehound/error.hpp"
#include "rulehound/rule_model.hpp"

namespace rulehound {

enum class Role { kInput, kTarget, kAuxiliary };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::kInput: return "input";
    case Role::kTarget: return "target";
    case Role::kAuxiliary: return "aux";
  }
  return "input";
}

inline Role role_from_string(const std::string& s) {
  if (s == "input") return Role::kInput;
  if (s == "target") return Role::kTarget;
  if (s == "aux" || s == "auxiliary") return Role::kAuxiliary;
  throw ParseError("unknown column role '" + s + "'");
}

struct Column {
  std::string name;
  StateKind kind = StateKind::kContinuous;
  Role role = Role::kInput;
  // Dictionary for categorical columns: category i is encoded as i.
  std::vector<std::string> categories;
};

struct Schema {
  std::vector<Column> columns;
  bool header = true;

  std::vector<std::size_t> indices(Role role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].role == role) out.push_back(i);
    }
    return out;
  }
  std::vector<const Column*> of(Role role) const {
    std::vector<const Column*> out;
    for (const auto& c : columns) {
      if (c.role == role) out.push_back(&c);
    }
    return out;
  }
  std::size_t num_inputs() const { return indices(Role::kInput).size(); }
  std::size_t num_targets() const { return indices(Role::kTarget).size(); }

  void validate() const {
    if (num_inputs() == 0) throw StructuralError("schema has no input column");
    if (num_targets() == 0) throw StructuralError("schema has no target column");
  }

  // Inputs become condition states, targets become conclusion states.
  RuleSchema rule_schema() const {
    RuleSchema rs;
    for (const auto* c : of(Role::kInput)) rs.conditions.push_back({c->name, c->kind});
    for (const auto* c : of(Role::kTarget)) {
      rs.conclusions.push_back({c->name, StateKind::kDiscrete});
    }
    return rs;
  }
};

inline nlohmann::json schema_to_json(const Schema& s) {
  nlohmann::json j;
  j["header"] = s.header;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : s.columns) {
    nlohmann::json jc = {{"name", c.name},
                         {"kind", to_string(c.kind)},
                         {"role", to_string(c.role)}};
    if (!c.categories.empty()) jc["categories"] = c.categories;
    j["columns"].push_back(std::move(jc));
  }
  return j;
}

inline Schema schema_from_json(const nlohmann::json& j) {
  Schema s;
  try {
    s.header = j.value("header", true);
    for (const auto& jc : j.at("columns")) {
      Column c;
      c.name = jc.at("name").get<std::string>();
      c.kind = state_kind_from_string(jc.value("kind", "continuous"));
      c.role = role_from_string(jc.value("role", "input"));
      if (jc.contains("categories")) {
        c.categories = jc.at("categories").get<std::vector<std::string>>();
        c.kind = StateKind::kDiscrete;
      }
      s.columns.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  s.validate();
  return s;
}

inline Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema '" + path + "': " + e.what());
  }
  return schema_from_json(j);
}

struct Sample {
  std::vector<double> states;
  std::vector<double> targets;
  std::vector<double> aux;
};

enum class Provenance { kFull, kSeen, kUnseen };

struct Dataset {
  Schema schema;
  std::vector<Sample> samples;
  Provenance provenance = Provenance::kFull;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  std::vector<double> state_column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.states[j]);
    return out;
  }

  // Targets folded into one numeric column. A single target is used as is;
  // several targets are replaced by the rank of their tuple among the
  // distinct tuples present, in lexicographic order.
  std::vector<double> target_codes() const {
    std::vector<double> out;
    out.reserve(samples.size());
    if (schema.num_targets() == 1) {
      for (const auto& s : samples) out.push_back(s.targets[0]);
      return out;
    }
    std::map<std::vector<double>, std::size_t> rank;
    for (const auto& s : samples) rank.emplace(s.targets, 0);
    std::size_t k = 0;
    for (auto& [tuple, r] : rank) r = k++;
    for (const auto& s : samples) out.push_back(static_cast<double>(rank[s.targets]));
    return out;
  }

  // Observed [min, max] of each input state.
  std::vector<std::pair<double, double>> state_ranges() const {
    const std::size_t n = schema.num_inputs();
    std::vector<std::pair<double, double>> r(n, {0.0, 0.0});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double v = samples[i].states[j];
        if (i == 0) {
          r[j] = {v, v};
        } else {
          r[j].first = std::min(r[j].first, v);
          r[j].second = std::max(r[j].second, v);
        }
      }
    }
    return r;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() &&
         std::isfinite(out);
}

}  // namespace detail

// Parses CSV text against `schema`. Categorical values listed in the schema
// dictionary are encoded by position; discrete columns without a dictionary
// accept numbers, or grow a dictionary in first-seen order for labels.
inline Dataset parse_csv(std::istream& in, Schema schema) {
  schema.validate();
  Dataset ds;
  std::vector<bool> frozen(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    frozen[c] = !schema.columns[c].categories.empty();
  }

  std::string line;
  std::size_t row = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    any = true;
    if (row == 1 && schema.header) {
      if (detail::split_fields(line).size() != schema.columns.size()) {
        throw ParseError("header has wrong column count", row);
      }
      continue;
    }
    const auto fields = detail::split_fields(line);
    if (fields.size() != schema.columns.size()) {
      throw ParseError("expected " + std::to_string(schema.columns.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       row);
    }
    Sample s;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      Column& col = schema.columns[c];
      double v = 0.0;
      if (!col.categories.empty() || !detail::parse_double(fields[c], v)) {
        if (col.kind == StateKind::kContinuous) {
          throw ParseError("column '" + col.name + "': not a number '" +
                               std::string(fields[c]) + "'",
                           row);
        }
        const auto it = std::find(col.categories.begin(), col.categories.end(),
                                  fields[c]);
        if (it != col.categories.end()) {
          v = static_cast<double>(it - col.categories.begin());
        } else if (frozen[c] || fields[c].empty()) {
          throw ParseError("column '" + col.name + "': unknown category '" +
                               std::string(fields[c]) + "'",
                           row);
        } else {
          col.categories.emplace_back(fields[c]);
          v = static_cast<double>(col.categories.size() - 1);
        }
      }
      switch (col.role) {
        case Role::kInput: s.states.push_back(v); break;
        case Role::kTarget: s.targets.push_back(v); break;
        case Role::kAuxiliary: s.aux.push_back(v); break;
      }
    }
    ds.samples.push_back(std::move(s));
  }
  if (!any || ds.samples.empty()) throw ParseError("empty dataset");
  ds.schema = std::move(schema);
  return ds;
}

inline Dataset load_csv(const std::string& path, Schema schema) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open data file '" + path + "'");
  return parse_csv(in, std::move(schema));
}

// Stratified shuffle split. Each target tuple contributes floor(ratio * n_c)
// samples to the seen part; the remaining seats up to round(ratio * N) go to
// the strata with the largest fractional remainders. Both parts keep the
// original sample order.
inline std::pair<Dataset, Dataset> split_seen_unseen(const Dataset& data,
                                                     double ratio,
                                                     std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ContractError("split ratio must lie in (0, 1)");
  }
  std::map<std::vector<double>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < data.size(); ++i) {
    strata[data.samples[i].targets].push_back(i);
  }
  std::mt19937_64 rng(seed);
  struct Seat {
    std::vector<std::size_t>* members;
    std::size_t take;
    double remainder;
  };
  std::vector<Seat> seats;
  std::size_t assigned = 0;
  for (auto& [key, members] : strata) {
    std::shuffle(members.begin(), members.end(), rng);
    const double want = ratio * static_cast<double>(members.size());
    const auto take = static_cast<std::size_t>(std::floor(want));
    seats.push_back({&members, take, want - static_cast<double>(take)});
    assigned += take;
  }
  const auto total = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(data.size())));
  std::vector<std::size_t> order(seats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return seats[a].remainder > seats[b].remainder;
  });
  for (std::size_t k = 0; assigned < total && k < order.size(); ++k) {
    Seat& s = seats[order[k]];
    if (s.take < s.members->size()) {
      ++s.take;
      ++assigned;
    }
  }

  std::vector<bool> is_seen(data.size(), false);
  for (const auto& s : seats) {
    for (std::size_t k = 0; k < s.take; ++k) is_seen[(*s.members)[k]] = true;
  }
  Dataset seen{data.schema, {}, Provenance::kSeen};
  Dataset unseen{data.schema, {}, Provenance::kUnseen};
  for (std::size_t i = 0; i < data.size(); ++i) {
    (is_seen[i] ? seen : unseen).samples.push_back(data.samples[i]);
  }
  return {std::move(seen), std::move(unseen)};
}

}  // namespace rulehound

#endif  // RULEHOUND_DATASET_HPP_
