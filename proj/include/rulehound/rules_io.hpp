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

// JSON envelopes for extracted rule sets (PBRE and RxNCM).

#ifndef RULEHOUND_RULES_IO_HPP_
#define RULEHOUND_RULES_IO_HPP_

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rulehound/error.hpp"
#include "rulehound/pbre.hpp"
#include "rulehound/rule_model.hpp"
#include "rulehound/rxncm.hpp"

namespace rulehound {

namespace detail {

inline nlohmann::json schema_entries(const RuleSchema& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& st : s.conditions) {
    out.push_back({{"name", st.name}, {"kind", to_string(st.kind)}, {"role", "condition"}});
  }
  for (const auto& st : s.conclusions) {
    out.push_back({{"name", st.name}, {"kind", to_string(st.kind)}, {"role", "conclusion"}});
  }
  return out;
}

inline RuleSchema schema_from_entries(const nlohmann::json& j) {
  RuleSchema s;
  for (const auto& e : j) {
    StateSpec spec{e.at("name").get<std::string>(),
                   state_kind_from_string(e.at("kind").get<std::string>())};
    if (e.value("role", "condition") == "conclusion") {
      s.conclusions.push_back(std::move(spec));
    } else {
      s.conditions.push_back(std::move(spec));
    }
  }
  return s;
}

inline std::size_t index_of(const std::vector<StateSpec>& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].name == name) return i;
  }
  throw ParseError("rule set refers to unknown state '" + name + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const RuleSet& rs) {
  nlohmann::json j;
  j["format"] = "pbre";
  j["schema"] = detail::schema_entries(rs.schema);
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rs.rules) {
    nlohmann::json jr;
    jr["conditions"] = nlohmann::json::object();
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      if (!r.conditions[i]) continue;
      jr["conditions"][rs.schema.conditions[i].name] = {{"min", r.conditions[i]->min},
                                                        {"mean", r.conditions[i]->mean},
                                                        {"max", r.conditions[i]->max}};
    }
    jr["conclusions"] = nlohmann::json::object();
    for (std::size_t i = 0; i < r.conclusions.size(); ++i) {
      jr["conclusions"][rs.schema.conclusions[i].name] = {{"value", r.conclusions[i].value},
                                                          {"count", r.conclusions[i].count}};
    }
    j["rules"].push_back(std::move(jr));
  }
  j["insignificant"] = nlohmann::json::array();
  for (std::size_t s : rs.insignificant) j["insignificant"].push_back(rs.schema.conditions[s].name);
  j["correlations"] = nlohmann::json::object();
  for (std::size_t i = 0; i < rs.correlations.size(); ++i) {
    j["correlations"][rs.schema.conditions[i].name] = rs.correlations[i];
  }
  return j;
}

inline RuleSet rule_set_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "pbre") != "pbre") throw ParseError("not a PBRE rule set");
    RuleSet rs;
    rs.schema = detail::schema_from_entries(j.at("schema"));
    for (const auto& jr : j.at("rules")) {
      Rule r;
      r.conditions.assign(rs.schema.conditions.size(), std::nullopt);
      r.conclusions.assign(rs.schema.conclusions.size(), Conclusion{});
      for (const auto& [name, v] : jr.at("conditions").items()) {
        r.conditions[detail::index_of(rs.schema.conditions, name)] =
            StateValue{v.at("mean").get<double>(), v.at("min").get<double>(),
                       v.at("max").get<double>()};
      }
      for (const auto& [name, v] : jr.at("conclusions").items()) {
        r.conclusions[detail::index_of(rs.schema.conclusions, name)] =
            Conclusion{v.at("value").get<double>(), v.at("count").get<std::size_t>()};
      }
      rs.rules.push_back(std::move(r));
    }
    for (const auto& name : j.value("insignificant", nlohmann::json::array())) {
      rs.insignificant.push_back(
          detail::index_of(rs.schema.conditions, name.get<std::string>()));
    }
    rs.correlations.entries.assign(rs.schema.conditions.size(), 0.0);
    if (j.contains("correlations")) {
      for (const auto& [name, v] : j.at("correlations").items()) {
        rs.correlations.entries[detail::index_of(rs.schema.conditions, name)] =
            v.get<double>();
      }
    }
    return rs;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rule set: ") + e.what());
  }
}

inline nlohmann::json to_json(const RxRuleSet& rs) {
  nlohmann::json j;
  j["format"] = "rxncm";
  j["schema"] = detail::schema_entries(rs.schema);
  j["attributes"] = nlohmann::json::array();
  for (std::size_t a : rs.attributes) j["attributes"].push_back(rs.schema.conditions[a].name);
  j["ranges"] = nlohmann::json::object();
  for (std::size_t i = 0; i < rs.ranges.size(); ++i) {
    j["ranges"][rs.schema.conditions[i].name] = {{"min", rs.ranges[i].min},
                                                 {"max", rs.ranges[i].max}};
  }
  j["rules"] = nlohmann::json::array();
  const std::string target =
      rs.schema.conclusions.empty() ? "class" : rs.schema.conclusions.front().name;
  for (const auto& r : rs.rules) {
    nlohmann::json jr;
    jr["conditions"] = nlohmann::json::object();
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
      if (!r.conditions[i]) continue;
      jr["conditions"][rs.schema.conditions[i].name] = {{"min", r.conditions[i]->min},
                                                        {"max", r.conditions[i]->max}};
    }
    jr["conclusions"] = {{target, {{"value", r.conclusion}}}};
    j["rules"].push_back(std::move(jr));
  }
  return j;
}

inline RxRuleSet rx_rule_set_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "rxncm") throw ParseError("not an RxNCM rule set");
    RxRuleSet rs;
    rs.schema = detail::schema_from_entries(j.at("schema"));
    for (const auto& name : j.at("attributes")) {
      rs.attributes.push_back(detail::index_of(rs.schema.conditions, name.get<std::string>()));
    }
    rs.ranges.assign(rs.schema.conditions.size(), Interval{});
    for (const auto& [name, v] : j.at("ranges").items()) {
      rs.ranges[detail::index_of(rs.schema.conditions, name)] =
          Interval{v.at("min").get<double>(), v.at("max").get<double>()};
    }
    for (const auto& jr : j.at("rules")) {
      RxRule r;
      r.conditions.assign(rs.schema.conditions.size(), std::nullopt);
      for (const auto& [name, v] : jr.at("conditions").items()) {
        r.conditions[detail::index_of(rs.schema.conditions, name)] =
            Interval{v.at("min").get<double>(), v.at("max").get<double>()};
      }
      for (const auto& [name, v] : jr.at("conclusions").items()) {
        r.conclusion = v.at("value").get<double>();
      }
      rs.rules.push_back(std::move(r));
    }
    return rs;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rule set: ") + e.what());
  }
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace rulehound

#endif  // RULEHOUND_RULES_IO_HPP_
