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

// Pedagogical rule extraction: instance rules from model queries,
// generalisation through the rule tree, combination of overlapping rules,
// and refinement by removing insignificant states against unseen data.

#ifndef RULEHOUND_PBRE_HPP_
#define RULEHOUND_PBRE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rulehound/dataset.hpp"
#include "rulehound/error.hpp"
#include "rulehound/oracle.hpp"
#include "rulehound/rule_model.hpp"
#include "rulehound/stats.hpp"

namespace rulehound {

struct ExtractionConfig {
  // One entry per condition state. Left empty, continuous states get
  // `tolerance_fraction` of their observed range in the seen data and
  // discrete states get 0.
  std::vector<double> merge_tolerance;
  double tolerance_fraction = 0.05;
  double epsilon_corr = 1e-3;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon_corr > 0.0)) throw ContractError("epsilon must be > 0");
    if (!(tolerance_fraction >= 0.0)) throw ContractError("tolerance fraction must be >= 0");
    for (double t : merge_tolerance) {
      if (!(t >= 0.0)) throw ContractError("merge tolerances must be >= 0");
    }
  }
};

struct RuleSet {
  RuleSchema schema;
  std::vector<Rule> rules;
  // Indices into schema.conditions of states dropped by refinement.
  std::vector<std::size_t> insignificant;
  // States-targets correlation of the seen data, used by inference.
  CorrVector correlations;

  std::vector<bool> active_mask() const {
    std::vector<bool> active(schema.conditions.size(), true);
    for (std::size_t s : insignificant) active[s] = false;
    return active;
  }
};

// Rule support: number of instance rules that reached the rule's leaf.
inline std::size_t support(const Rule& r) {
  return r.conclusions.empty() ? 1 : r.conclusions.back().count;
}


inline InstanceRule make_instance_rule(std::span<const double> states,
                                       std::span<const std::size_t> chosen,
                                       std::int64_t t) {
  InstanceRule ir;
  ir.conditions.assign(states.begin(), states.end());
  for (std::size_t c : chosen) ir.conclusions.push_back(static_cast<double>(c));
  ir.timestamp = t;
  return ir;
}

inline InstanceRule make_instance_rule(std::span<const double> states,
                                       std::vector<double> conclusions,
                                       std::int64_t t) {
  InstanceRule ir;
  ir.conditions.assign(states.begin(), states.end());
  ir.conclusions = std::move(conclusions);
  ir.timestamp = t;
  return ir;
}

inline RuleTree generalize(std::span<const InstanceRule> instance_rules,
                           const RuleSchema& schema,
                           std::span<const double> tolerance) {
  RuleTree tree(schema);
  for (const auto& ir : instance_rules) tree.insert(ir, tolerance);
  return tree;
}

// Per-state merge tolerances for `cfg` over the seen data.
inline std::vector<double> resolve_tolerances(const ExtractionConfig& cfg,
                                              const Dataset& seen) {
  const RuleSchema rs = seen.schema.rule_schema();
  if (!cfg.merge_tolerance.empty()) {
    if (cfg.merge_tolerance.size() != rs.conditions.size()) {
      throw StructuralError("merge tolerance needs one entry per input state");
    }
    return cfg.merge_tolerance;
  }
  std::vector<double> tol(rs.conditions.size(), 0.0);
  const auto ranges = seen.state_ranges();
  for (std::size_t j = 0; j < tol.size(); ++j) {
    if (rs.conditions[j].kind == StateKind::kContinuous) {
      tol[j] = cfg.tolerance_fraction * (ranges[j].second - ranges[j].first);
    }
  }
  return tol;
}

namespace detail {

inline Rule merge_rules(const Rule& a, const Rule& b) {
  Rule out;
  const std::size_t na = support(a), nb = support(b);
  out.conditions.resize(a.conditions.size());
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    if (a.conditions[i] && b.conditions[i]) {
      out.conditions[i] = hull(*a.conditions[i], na, *b.conditions[i], nb);
    }
  }
  out.conclusions = a.conclusions;
  for (std::size_t i = 0; i < out.conclusions.size(); ++i) {
    out.conclusions[i].count += b.conclusions[i].count;
  }
  return out;
}

// Rules may only combine when their conclusions, their engaged states and
// every discrete condition value agree.
inline std::vector<double> combine_key(const Rule& r, const RuleSchema& schema) {
  std::vector<double> key = r.conclusion_values();
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (!r.conditions[i]) {
      key.push_back(-1.0);
    } else {
      key.push_back(1.0);
      if (schema.conditions[i].kind == StateKind::kDiscrete) {
        key.push_back(r.conditions[i]->mean);
      }
    }
  }
  return key;
}

inline bool sweep(std::vector<Rule>& group, std::size_t state) {
  std::stable_sort(group.begin(), group.end(), [state](const Rule& x, const Rule& y) {
    return x.conditions[state]->min < y.conditions[state]->min;
  });
  std::vector<Rule> out;
  Rule running = group.front();
  bool merged = false;
  for (std::size_t k = 1; k < group.size(); ++k) {
    const Rule& next = group[k];
    if (next.conditions[state]->min <= running.conditions[state]->max) {
      running = merge_rules(running, next);
      merged = true;
    } else {
      out.push_back(std::move(running));
      running = next;
    }
  }
  out.push_back(std::move(running));
  group = std::move(out);
  return merged;
}

}  // namespace detail

// Merges rules that share conclusions (and discrete conditions) and whose
// interval overlaps on some continuous state. Each continuous state is swept
// in ascending order of its minimum; sweeps repeat until no pair overlaps,
// so the result is a fixed point. Merged rules take the interval hull of
// every condition, count-weighted means and summed counts.
inline std::vector<Rule> combine(const std::vector<Rule>& rules,
                                 const RuleSchema& schema) {
  std::vector<std::vector<double>> keys;
  std::vector<std::vector<Rule>> groups;
  for (const auto& r : rules) {
    if (r.conditions.size() != schema.conditions.size()) {
      throw StructuralError("combine: rule does not match schema");
    }
    auto key = detail::combine_key(r, schema);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(std::move(key));
      groups.push_back({r});
    } else {
      groups[static_cast<std::size_t>(it - keys.begin())].push_back(r);
    }
  }

  std::vector<Rule> out;
  for (auto& group : groups) {
    std::vector<std::size_t> swept;
    for (std::size_t i = 0; i < schema.conditions.size(); ++i) {
      if (schema.conditions[i].kind == StateKind::kContinuous &&
          group.front().conditions[i]) {
        swept.push_back(i);
      }
    }
    if (swept.empty()) {
      // Identical conditions: duplicates collapse into one rule.
      Rule merged = group.front();
      for (std::size_t k = 1; k < group.size(); ++k) {
        merged = detail::merge_rules(merged, group[k]);
      }
      out.push_back(std::move(merged));
      continue;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t state : swept) {
        if (group.size() > 1 && detail::sweep(group, state)) changed = true;
      }
    }
    for (auto& r : group) out.push_back(std::move(r));
  }
  return out;
}

struct InferenceOutcome {
  std::optional<std::vector<double>> conclusions;
  std::size_t candidates = 0;  // rules whose intervals contain the sample
  bool fallback = false;       // no rule matched; all rules were correlated
};

// Conclusions for one sample, considering only the states flagged in
// `active`.
//  - exactly one matching rule: its conclusions;
//  - several: correlate the correlation-weighted sample row with each
//    candidate's condition means; when all correlations lie within epsilon
//    the candidate with the largest summed conclusion count wins, otherwise
//    the most correlated one;
//  - none: every rule becomes a candidate. The sample is left uninferred
//    only if that fallback carries no signal (all correlations ~0 and all
//    counts equal).
inline InferenceOutcome infer_detailed(const std::vector<Rule>& rules,
                                       const RuleSchema& schema,
                                       const std::vector<bool>& active,
                                       std::span<const double> states,
                                       const CorrVector& corr, double epsilon) {
  InferenceOutcome result;
  if (rules.empty()) throw ContractError("infer: empty rule set");
  if (states.size() != schema.conditions.size() || active.size() != states.size() ||
      corr.size() != states.size()) {
    throw StructuralError("infer: sample, mask and correlations disagree with schema");
  }

  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    bool ok = true;
    for (std::size_t i = 0; i < states.size() && ok; ++i) {
      if (!active[i]) continue;
      const auto& c = rules[r].conditions[i];
      if (!c) continue;
      ok = schema.conditions[i].kind == StateKind::kDiscrete ? c->mean == states[i]
                                                             : c->contains(states[i]);
    }
    if (ok) candidates.push_back(r);
  }
  result.candidates = candidates.size();
  if (candidates.size() == 1) {
    result.conclusions = rules[candidates.front()].conclusion_values();
    return result;
  }
  if (candidates.empty()) {
    result.fallback = true;
    candidates.resize(rules.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  }

  std::vector<double> weights;
  std::vector<std::vector<double>> arr(candidates.size() + 1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!active[i]) continue;
    weights.push_back(corr[i]);
    arr[0].push_back(states[i]);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const auto& c = rules[candidates[k]].conditions[i];
      arr[k + 1].push_back(c ? c->mean : states[i]);
    }
  }
  const std::vector<double> cor = weighted_rule_correlations(weights, arr);
  const auto [lo, hi] = std::minmax_element(cor.begin(), cor.end());

  std::size_t pick = 0;
  if (*hi - *lo < epsilon) {
    bool equal_counts = true;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
      const std::size_t f = rules[candidates[k]].frequency();
      if (f != rules[candidates[0]].frequency()) equal_counts = false;
      if (f > rules[candidates[pick]].frequency()) pick = k;
    }
    if (result.fallback && equal_counts && std::abs(*hi) < epsilon &&
        std::abs(*lo) < epsilon) {
      return result;
    }
  } else {
    pick = static_cast<std::size_t>(hi - cor.begin());
  }
  result.conclusions = rules[candidates[pick]].conclusion_values();
  return result;
}

inline std::optional<std::vector<double>> infer(const RuleSet& rs,
                                                std::span<const double> states,
                                                double epsilon) {
  return infer_detailed(rs.rules, rs.schema, rs.active_mask(), states,
                        rs.correlations, epsilon)
      .conclusions;
}

inline std::optional<std::vector<double>> infer(const RuleSet& rs,
                                                const Sample& sample,
                                                const ExtractionConfig& cfg) {
  return infer(rs, sample.states, cfg.epsilon_corr);
}

struct RisReport {
  double initial_accuracy = 0.0;
  double final_accuracy = 0.0;
  // Condition states in the order they were examined.
  std::vector<std::size_t> order;
  // Accuracy after every accepted removal or re-addition, starting with the
  // no-removal accuracy.
  std::vector<double> accepted;
};

namespace detail {

inline double masked_accuracy(const std::vector<Rule>& rules, const RuleSchema& schema,
                              const std::vector<bool>& active, const Dataset& unseen,
                              const CorrVector& corr, double epsilon) {
  std::size_t correct = 0;
  for (const auto& s : unseen.samples) {
    const auto out = infer_detailed(rules, schema, active, s.states, corr, epsilon);
    if (out.conclusions && *out.conclusions == s.targets) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(unseen.size());
}

}  // namespace detail

// Remove Insignificant States. States are tried in ascending order of their
// states-targets correlation on the seen data; a state is dropped when the
// unseen accuracy without it is at least the best accuracy so far, and a
// dropped state is re-added when that keeps accuracy at least as high. The
// running best starts at the no-removal accuracy, so the accepted accuracy
// never decreases.
inline RuleSet refine_ris(const Dataset& seen, const Dataset& unseen,
                          std::vector<Rule> rules, const ExtractionConfig& cfg,
                          RisReport* report = nullptr) {
  if (unseen.empty()) throw ContractError("refine_ris: empty unseen dataset");
  if (rules.empty()) throw ContractError("refine_ris: no rules to refine");
  cfg.validate();
  RuleSet rs;
  rs.schema = seen.schema.rule_schema();
  rs.correlations = states_targets_corr(seen);
  const std::size_t n = rs.schema.conditions.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rs.correlations[a] < rs.correlations[b];
  });

  std::vector<bool> insignificant(n, false);
  auto accuracy_without = [&](std::size_t extra, bool drop_extra) {
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) active[i] = !insignificant[i];
    if (extra < n) active[extra] = !drop_extra;
    return detail::masked_accuracy(rules, rs.schema, active, unseen, rs.correlations,
                                   cfg.epsilon_corr);
  };

  double max_acc = accuracy_without(n, false);
  RisReport local;
  local.initial_accuracy = max_acc;
  local.order = order;
  local.accepted.push_back(max_acc);

  std::vector<std::size_t> dropped;
  for (std::size_t state : order) {
    const double acc = accuracy_without(state, true);
    if (acc >= max_acc) {
      insignificant[state] = true;
      dropped.push_back(state);
      max_acc = acc;
      local.accepted.push_back(acc);
    }
  }
  for (std::size_t state : std::vector<std::size_t>(dropped)) {
    const double acc = accuracy_without(state, false);
    if (acc >= max_acc) {
      insignificant[state] = false;
      max_acc = acc;
      local.accepted.push_back(acc);
    }
  }
  local.final_accuracy = max_acc;

  for (std::size_t state : dropped) {
    if (!insignificant[state]) continue;
    rs.insignificant.push_back(state);
    for (auto& r : rules) r.conditions[state].reset();
  }
  std::sort(rs.insignificant.begin(), rs.insignificant.end());
  rs.rules = std::move(rules);
  if (report) *report = std::move(local);
  return rs;
}

struct Extraction {
  RuleSet rules;             // final, refined
  RuleSet combined;          // generalised and combined, before refinement
  std::size_t instance_rules = 0;
  std::size_t generalized_rules = 0;  // leaves of the rule tree
  RisReport ris;
};

inline std::vector<InstanceRule> instance_rules_from(const OracleModel& model,
                                                     const Dataset& seen) {
  const std::size_t nt = seen.schema.num_targets();
  std::vector<InstanceRule> out;
  out.reserve(seen.size());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    std::vector<double> y = model.predict(seen.samples[i].states);
    if (y.size() != nt) {
      throw StructuralError("model returned " + std::to_string(y.size()) +
                            " conclusions, schema declares " + std::to_string(nt));
    }
    out.push_back(make_instance_rule(seen.samples[i].states, std::move(y),
                                     static_cast<std::int64_t>(i)));
  }
  return out;
}

// Full pipeline: query the model on every seen sample, generalise the
// instance rules, combine, then refine against the unseen data.
inline Extraction extract(const OracleModel& model, const Dataset& seen,
                          const Dataset& unseen, const ExtractionConfig& cfg) {
  cfg.validate();
  if (seen.empty()) throw ContractError("extract: empty seen dataset");
  const RuleSchema schema = seen.schema.rule_schema();
  const std::vector<double> tol = resolve_tolerances(cfg, seen);
  const auto irs = instance_rules_from(model, seen);
  const RuleTree tree = generalize(irs, schema, tol);
  const std::vector<Rule> leaves = tree_to_rules(tree);

  Extraction ex;
  ex.instance_rules = irs.size();
  ex.generalized_rules = leaves.size();
  ex.combined.schema = schema;
  ex.combined.rules = combine(leaves, schema);
  ex.combined.correlations = states_targets_corr(seen);
  ex.rules = refine_ris(seen, unseen, ex.combined.rules, cfg, &ex.ris);
  return ex;
}

}  // namespace rulehound

#endif  // RULEHOUND_PBRE_HPP_
