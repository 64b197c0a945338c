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

// Linked-list rule tree and the interval rules read out of it.
//
// Every root-to-leaf path of a RuleTree is one rule: the first levels hold
// condition states in schema order, the remaining levels hold conclusion
// (actuator / class) states. A node stores the mean/min/max of every value
// merged into it and the number of times it was traversed.

#ifndef RULEHOUND_RULE_MODEL_HPP_
#define RULEHOUND_RULE_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rulehound/error.hpp"

namespace rulehound {

enum class StateKind { kDiscrete, kContinuous };

inline const char* to_string(StateKind kind) {
  return kind == StateKind::kDiscrete ? "discrete" : "continuous";
}

inline StateKind state_kind_from_string(const std::string& s) {
  if (s == "discrete" || s == "categorical" || s == "integer") {
    return StateKind::kDiscrete;
  }
  if (s == "continuous" || s == "real") return StateKind::kContinuous;
  throw ParseError("unknown state kind '" + s + "'");
}

struct StateValue {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  static StateValue point(double v) { return {v, v, v}; }

  bool contains(double v) const { return min <= v && v <= max; }

  bool operator==(const StateValue&) const = default;
};

// Folds `v` into a value that already summarises `n` raw samples.
inline void absorb(StateValue& sv, double v, std::size_t n) {
  sv.min = std::min(sv.min, v);
  sv.max = std::max(sv.max, v);
  sv.mean += (v - sv.mean) / static_cast<double>(n + 1);
  sv.mean = std::clamp(sv.mean, sv.min, sv.max);
}

// Count-weighted union of two summaries.
inline StateValue hull(const StateValue& a, std::size_t na,
                       const StateValue& b, std::size_t nb) {
  StateValue out;
  out.min = std::min(a.min, b.min);
  out.max = std::max(a.max, b.max);
  const double total = static_cast<double>(na + nb);
  out.mean = total > 0.0 ? (a.mean * static_cast<double>(na) +
                            b.mean * static_cast<double>(nb)) /
                               total
                         : 0.5 * (a.mean + b.mean);
  out.mean = std::clamp(out.mean, out.min, out.max);
  return out;
}

struct StateSpec {
  std::string name;
  StateKind kind = StateKind::kContinuous;

  bool operator==(const StateSpec&) const = default;
};

// Condition states first, conclusion states after. Conclusions are always
// matched by equality.
struct RuleSchema {
  std::vector<StateSpec> conditions;
  std::vector<StateSpec> conclusions;

  std::size_t depth() const { return conditions.size() + conclusions.size(); }
  bool operator==(const RuleSchema&) const = default;
};

// A node's `count` is the occurrence count of the (parent -> node) subnode
// entry. The root count is the number of inserted instance rules.
struct Node {
  StateValue data;
  std::size_t count = 0;
  std::vector<Node> children;
};

// First child that can take `value`: equal for discrete states, inside
// [min - tolerance, max + tolerance] for continuous ones.
inline std::optional<std::size_t> node_child_lookup(const Node& node,
                                                    double value,
                                                    StateKind kind,
                                                    double tolerance) {
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const StateValue& d = node.children[i].data;
    if (kind == StateKind::kDiscrete) {
      if (d.mean == value) return i;
    } else if (d.min - tolerance <= value && value <= d.max + tolerance) {
      return i;
    }
  }
  return std::nullopt;
}

struct InstanceRule {
  std::vector<double> conditions;
  std::vector<double> conclusions;
  std::int64_t timestamp = 0;
};

struct Conclusion {
  double value = 0.0;
  std::size_t count = 0;

  bool operator==(const Conclusion&) const = default;
};

// Conditions are aligned with RuleSchema::conditions; a disengaged entry
// means the state was removed from the rule and matches anything.
struct Rule {
  std::vector<std::optional<StateValue>> conditions;
  std::vector<Conclusion> conclusions;

  std::size_t frequency() const {
    std::size_t s = 0;
    for (const auto& c : conclusions) s += c.count;
    return s;
  }

  bool same_conclusions(const Rule& other) const {
    if (conclusions.size() != other.conclusions.size()) return false;
    for (std::size_t i = 0; i < conclusions.size(); ++i) {
      if (conclusions[i].value != other.conclusions[i].value) return false;
    }
    return true;
  }

  std::vector<double> conclusion_values() const {
    std::vector<double> out;
    out.reserve(conclusions.size());
    for (const auto& c : conclusions) out.push_back(c.value);
    return out;
  }

  bool operator==(const Rule&) const = default;
};

// True iff every engaged condition contains the corresponding state.
// Discrete states are checked by equality with the stored value.
inline bool rule_matches(const Rule& rule, std::span<const double> states,
                         const RuleSchema& schema) {
  if (states.size() != rule.conditions.size()) {
    throw StructuralError("sample has " + std::to_string(states.size()) +
                          " states, rule has " +
                          std::to_string(rule.conditions.size()));
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& c = rule.conditions[i];
    if (!c) continue;
    if (schema.conditions[i].kind == StateKind::kDiscrete) {
      if (c->mean != states[i]) return false;
    } else if (!c->contains(states[i])) {
      return false;
    }
  }
  return true;
}

class RuleTree {
 public:
  explicit RuleTree(RuleSchema schema) : schema_(std::move(schema)) {}

  const RuleSchema& schema() const { return schema_; }
  const Node& root() const { return root_; }
  std::size_t size() const { return root_.count; }

  // `tolerance` holds one entry per condition state. An instance rule is
  // merged into an existing branch only if every condition is close to that
  // branch and every conclusion is equal; otherwise it shares the existing
  // prefix whose intervals already contain its values and forks below it.
  void insert(const InstanceRule& ir, std::span<const double> tolerance) {
    check(ir, tolerance);
    const std::vector<double> values = flatten(ir);

    std::vector<std::size_t> path;
    path.reserve(values.size());
    if (find_merge_path(root_, 0, values, tolerance, path)) {
      Node* node = &root_;
      ++node->count;
      for (std::size_t level = 0; level < path.size(); ++level) {
        node = &node->children[path[level]];
        absorb(node->data, values[level], node->count);
        ++node->count;
      }
      return;
    }

    Node* node = &root_;
    ++node->count;
    std::size_t level = 0;
    for (; level < values.size(); ++level) {
      auto next = containing_child(*node, level, values[level]);
      if (!next) break;
      node = &node->children[*next];
      absorb(node->data, values[level], node->count);
      ++node->count;
    }
    for (; level < values.size(); ++level) {
      node->children.push_back(Node{StateValue::point(values[level]), 1, {}});
      node = &node->children.back();
    }
  }

  // One rule per root-to-leaf path, depth first, children in insertion order.
  std::vector<Rule> to_rules() const {
    std::vector<Rule> rules;
    std::vector<const Node*> path;
    collect(root_, path, rules);
    return rules;
  }

 private:
  StateKind kind_at(std::size_t level) const {
    return level < schema_.conditions.size()
               ? schema_.conditions[level].kind
               : StateKind::kDiscrete;
  }

  void check(const InstanceRule& ir, std::span<const double> tolerance) const {
    if (ir.conditions.size() != schema_.conditions.size() ||
        ir.conclusions.size() != schema_.conclusions.size()) {
      throw StructuralError("instance rule does not conform to tree schema");
    }
    if (tolerance.size() != schema_.conditions.size()) {
      throw StructuralError("tolerance vector does not match condition count");
    }
    for (double t : tolerance) {
      if (!(t >= 0.0)) throw ContractError("merge tolerance must be >= 0");
    }
  }

  static std::vector<double> flatten(const InstanceRule& ir) {
    std::vector<double> values = ir.conditions;
    values.insert(values.end(), ir.conclusions.begin(), ir.conclusions.end());
    return values;
  }

  bool find_merge_path(const Node& node, std::size_t level,
                       const std::vector<double>& values,
                       std::span<const double> tolerance,
                       std::vector<std::size_t>& path) const {
    if (level == values.size()) return true;
    const StateKind kind = kind_at(level);
    const double tol = level < tolerance.size() ? tolerance[level] : 0.0;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const StateValue& d = node.children[i].data;
      const bool ok = kind == StateKind::kDiscrete
                          ? d.mean == values[level]
                          : d.min - tol <= values[level] &&
                                values[level] <= d.max + tol;
      if (!ok) continue;
      path.push_back(i);
      if (find_merge_path(node.children[i], level + 1, values, tolerance,
                          path)) {
        return true;
      }
      path.pop_back();
    }
    return false;
  }

  std::optional<std::size_t> containing_child(const Node& node,
                                              std::size_t level,
                                              double value) const {
    return node_child_lookup(node, value, kind_at(level), 0.0);
  }

  void collect(const Node& node, std::vector<const Node*>& path,
               std::vector<Rule>& out) const {
    if (node.children.empty()) {
      if (path.size() != schema_.depth()) return;  // empty tree
      Rule r;
      const std::size_t nc = schema_.conditions.size();
      r.conditions.reserve(nc);
      for (std::size_t i = 0; i < nc; ++i) r.conditions.emplace_back(path[i]->data);
      for (std::size_t i = nc; i < path.size(); ++i) {
        r.conclusions.push_back({path[i]->data.mean, path[i]->count});
      }
      out.push_back(std::move(r));
      return;
    }
    for (const Node& child : node.children) {
      path.push_back(&child);
      collect(child, path, out);
      path.pop_back();
    }
  }

  RuleSchema schema_;
  Node root_{StateValue{}, 0, {}};
};

inline void insert_instance(RuleTree& tree, const InstanceRule& ir,
                            std::span<const double> tolerance) {
  tree.insert(ir, tolerance);
}

inline std::vector<Rule> tree_to_rules(const RuleTree& tree) {
  return tree.to_rules();
}

}  // namespace rulehound

#endif  // RULEHOUND_RULE_MODEL_HPP_
