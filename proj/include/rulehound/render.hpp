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

// Plain-text rendering of extracted rules.

#ifndef RULEHOUND_RENDER_HPP_
#define RULEHOUND_RENDER_HPP_

#include <cstdio>
#include <string>

#include "rulehound/pbre.hpp"
#include "rulehound/rxncm.hpp"

namespace rulehound {

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace detail

// if s1 in [min, max] (avg mean), and ... then c1 = v1 (count n), and ...
inline std::string render_rule(const Rule& r, const RuleSchema& schema) {
  std::string out = "if ";
  bool first = true;
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (!r.conditions[i]) continue;
    const auto& sv = *r.conditions[i];
    if (!first) out += ", and ";
    first = false;
    out += schema.conditions[i].name;
    if (schema.conditions[i].kind == StateKind::kDiscrete && sv.min == sv.max) {
      out += " = " + detail::fmt_num(sv.mean);
    } else {
      out += " in [" + detail::fmt_num(sv.min) + ", " + detail::fmt_num(sv.max) +
             "] (avg " + detail::fmt_num(sv.mean) + ")";
    }
  }
  if (first) out += "always";
  out += ", then ";
  for (std::size_t k = 0; k < r.conclusions.size(); ++k) {
    if (k) out += ", and ";
    out += schema.conclusions[k].name + " = " + detail::fmt_num(r.conclusions[k].value) +
           " (count " + std::to_string(r.conclusions[k].count) + ")";
  }
  return out;
}

inline std::string render_rule(const RxRule& r, const RuleSchema& schema) {
  std::string out = "if ";
  bool first = true;
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (!r.conditions[i]) continue;
    if (!first) out += ", and ";
    first = false;
    out += schema.conditions[i].name + " in [" + detail::fmt_num(r.conditions[i]->min) +
           ", " + detail::fmt_num(r.conditions[i]->max) + "]";
  }
  if (first) out += "always";
  out += ", then " + schema.conclusions.at(0).name + " = " + detail::fmt_num(r.conclusion);
  return out;
}

}  // namespace rulehound

#endif  // RULEHOUND_RENDER_HPP_
