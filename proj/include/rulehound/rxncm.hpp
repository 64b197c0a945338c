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

// RxNCM baseline: per-class attribute ranges from model predictions,
// followed by condition pruning and overlap splitting, both gated on the
// accuracy over unseen data.
//
// The multi-match tie-break (tightest rule) and the midpoint overlap split
// are local choices; the published method does not pin them down.

#ifndef RULEHOUND_RXNCM_HPP_
#define RULEHOUND_RXNCM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rulehound/dataset.hpp"
#include "rulehound/error.hpp"
#include "rulehound/oracle.hpp"
#include "rulehound/rule_model.hpp"
#include "rulehound/stats.hpp"

namespace rulehound {

struct Interval {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const { return min <= v && v <= max; }
  bool operator==(const Interval&) const = default;
};

struct RxRule {
  // Aligned with the input states; disengaged = no condition.
  std::vector<std::optional<Interval>> conditions;
  double conclusion = 0.0;

  bool operator==(const RxRule&) const = default;
};

struct RxRuleSet {
  RuleSchema schema;
  std::vector<std::size_t> attributes;  // significant inputs
  std::vector<RxRule> rules;
  // Seen-data range of every input, used to normalise rule widths.
  std::vector<Interval> ranges;
};

namespace detail {

inline double model_accuracy(const OracleModel& model, const Dataset& data,
                             const std::vector<bool>& replaced,
                             const std::vector<double>& means) {
  std::size_t correct = 0;
  std::vector<double> x;
  for (const auto& s : data.samples) {
    x = s.states;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (replaced[j]) x[j] = means[j];
    }
    if (model.predict(x) == s.targets) ++correct;
  }
  return data.empty() ? 0.0
                      : static_cast<double>(correct) / static_cast<double>(data.size());
}

inline double total_width(const RxRule& r, const std::vector<Interval>& ranges) {
  double w = 0.0;
  for (std::size_t j = 0; j < r.conditions.size(); ++j) {
    if (!r.conditions[j]) {
      w += 1.0;
      continue;
    }
    const double span = ranges[j].max - ranges[j].min;
    if (span > 0.0) w += (r.conditions[j]->max - r.conditions[j]->min) / span;
  }
  return w;
}

}  // namespace detail

// Drops every input whose replacement by its column mean does not lower the
// model's accuracy on `data`. Inputs are tested in order and removals
// accumulate. At least one input is always kept.
inline std::vector<std::size_t> rx_filter_attributes(const OracleModel& model,
                                                     const Dataset& data) {
  if (data.empty()) throw ContractError("rx_filter_attributes: empty dataset");
  const std::size_t n = data.schema.num_inputs();
  std::vector<double> means(n, 0.0);
  for (const auto& s : data.samples) {
    for (std::size_t j = 0; j < n; ++j) means[j] += s.states[j];
  }
  for (double& m : means) m /= static_cast<double>(data.size());

  std::vector<bool> replaced(n, false);
  double current = detail::model_accuracy(model, data, replaced, means);
  std::size_t kept = n;
  for (std::size_t j = 0; j < n && kept > 1; ++j) {
    replaced[j] = true;
    const double acc = detail::model_accuracy(model, data, replaced, means);
    if (acc >= current) {
      current = acc;
      --kept;
    } else {
      replaced[j] = false;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (!replaced[j]) out.push_back(j);
  }
  return out;
}

// One rule per predicted class: the [min, max] of every significant input
// over the seen samples the model assigns to that class.
inline RxRuleSet rx_build_rules(const OracleModel& model, const Dataset& data,
                                const std::vector<std::size_t>& attrs) {
  if (attrs.empty()) throw ContractError("rx_build_rules: no attributes");
  if (data.schema.num_targets() != 1) {
    throw StructuralError("RxNCM handles a single class target");
  }
  RxRuleSet set;
  set.schema = data.schema.rule_schema();
  set.attributes = attrs;
  for (const auto& [lo, hi] : data.state_ranges()) set.ranges.push_back({lo, hi});

  std::map<double, RxRule> by_class;
  const std::size_t n = data.schema.num_inputs();
  for (const auto& s : data.samples) {
    const double label = model.predict(s.states).at(0);
    auto [it, fresh] = by_class.try_emplace(label);
    RxRule& r = it->second;
    if (fresh) {
      r.conclusion = label;
      r.conditions.assign(n, std::nullopt);
      for (std::size_t j : attrs) r.conditions[j] = Interval{s.states[j], s.states[j]};
      continue;
    }
    for (std::size_t j : attrs) {
      r.conditions[j]->min = std::min(r.conditions[j]->min, s.states[j]);
      r.conditions[j]->max = std::max(r.conditions[j]->max, s.states[j]);
    }
  }
  for (auto& [label, r] : by_class) set.rules.push_back(std::move(r));
  return set;
}

// Class of the matching rule; among several matches the one with the
// smallest total normalised width. No match abstains.
inline std::optional<double> rx_infer(const RxRuleSet& set,
                                      std::span<const double> states) {
  std::optional<std::size_t> best;
  double best_width = 0.0;
  for (std::size_t k = 0; k < set.rules.size(); ++k) {
    const RxRule& r = set.rules[k];
    bool ok = true;
    for (std::size_t j = 0; j < r.conditions.size() && ok; ++j) {
      if (r.conditions[j]) ok = r.conditions[j]->contains(states[j]);
    }
    if (!ok) continue;
    const double w = detail::total_width(r, set.ranges);
    if (!best || w < best_width) {
      best = k;
      best_width = w;
    }
  }
  if (!best) return std::nullopt;
  return set.rules[*best].conclusion;
}

inline double rx_accuracy(const RxRuleSet& set, const Dataset& data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : data.samples) {
    const auto y = rx_infer(set, s.states);
    if (y && *y == s.targets.at(0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// Greedy condition removal, conditions visited in ascending order of
// |correlation| with the target on `unseen`; a removal is kept when the
// unseen accuracy does not drop. Repeats until a full pass changes nothing.
inline RxRuleSet rx_prune(RxRuleSet set, const Dataset& unseen) {
  if (unseen.empty()) throw ContractError("rx_prune: empty unseen dataset");
  const CorrVector corr = states_targets_corr(unseen);
  std::vector<std::size_t> order(set.schema.conditions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(corr[a]) < std::abs(corr[b]);
  });

  double current = rx_accuracy(set, unseen);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& rule : set.rules) {
      for (std::size_t j : order) {
        if (!rule.conditions[j]) continue;
        const auto saved = rule.conditions[j];
        rule.conditions[j].reset();
        const double acc = rx_accuracy(set, unseen);
        if (acc >= current) {
          current = acc;
          changed = true;
        } else {
          rule.conditions[j] = saved;
        }
      }
    }
  }
  return set;
}

// For each pair of rules with different classes and each attribute on which
// their ranges overlap, cut the overlap at its midpoint: the rule whose range
// is centred lower keeps [min, mid], the other keeps [mid, max]. The cut is
// kept only if unseen accuracy strictly improves.
inline RxRuleSet rx_update_overlaps(RxRuleSet set, const Dataset& unseen) {
  if (unseen.empty()) throw ContractError("rx_update_overlaps: empty unseen dataset");
  double current = rx_accuracy(set, unseen);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < set.rules.size(); ++a) {
      for (std::size_t b = a + 1; b < set.rules.size(); ++b) {
        if (set.rules[a].conclusion == set.rules[b].conclusion) continue;
        for (std::size_t j = 0; j < set.schema.conditions.size(); ++j) {
          auto& ca = set.rules[a].conditions[j];
          auto& cb = set.rules[b].conditions[j];
          if (!ca || !cb) continue;
          const double lo = std::max(ca->min, cb->min);
          const double hi = std::min(ca->max, cb->max);
          if (lo > hi) continue;
          const double mid = 0.5 * (lo + hi);
          const Interval sa = *ca, sb = *cb;
          const bool a_lower = (ca->min + ca->max) <= (cb->min + cb->max);
          Interval& lower = a_lower ? *ca : *cb;
          Interval& upper = a_lower ? *cb : *ca;
          lower.max = std::max(lower.min, mid);
          upper.min = std::min(upper.max, mid);
          const double acc = rx_accuracy(set, unseen);
          if (acc > current) {
            current = acc;
            changed = true;
          } else {
            *ca = sa;
            *cb = sb;
          }
        }
      }
    }
  }
  return set;
}

struct RxExtraction {
  RxRuleSet rules;
  RxRuleSet unpruned;
  double built_accuracy = 0.0;
  double pruned_accuracy = 0.0;
  double final_accuracy = 0.0;
};

inline RxExtraction rxncm_extract(const OracleModel& model, const Dataset& seen,
                                  const Dataset& unseen) {
  RxExtraction ex;
  const auto attrs = rx_filter_attributes(model, seen);
  ex.unpruned = rx_build_rules(model, seen, attrs);
  ex.built_accuracy = rx_accuracy(ex.unpruned, unseen);
  RxRuleSet pruned = rx_prune(ex.unpruned, unseen);
  ex.pruned_accuracy = rx_accuracy(pruned, unseen);
  ex.rules = rx_update_overlaps(std::move(pruned), unseen);
  ex.final_accuracy = rx_accuracy(ex.rules, unseen);
  return ex;
}

}  // namespace rulehound

#endif  // RULEHOUND_RXNCM_HPP_
