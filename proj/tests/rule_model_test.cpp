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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rulehound/rule_model.hpp"
#include "test_util.hpp"

namespace rulehound {
namespace {

using testing::continuous_schema;

InstanceRule ir(std::vector<double> c, std::vector<double> y, std::int64_t t = 0) {
  return InstanceRule{std::move(c), std::move(y), t};
}

std::size_t leaf_count_sum(const RuleTree& tree) {
  std::size_t s = 0;
  for (const auto& r : tree.to_rules()) s += r.conclusions.back().count;
  return s;
}

void check_node_invariants(const Node& n, bool is_root) {
  if (!is_root) {
    EXPECT_LE(n.data.min, n.data.mean);
    EXPECT_LE(n.data.mean, n.data.max);
    EXPECT_GE(n.count, 1u);
  }
  std::size_t child_total = 0;
  for (const auto& c : n.children) {
    child_total += c.count;
    check_node_invariants(c, false);
  }
  // Every path through a node ends in exactly one leaf, so the counts of
  // the children add up to the node's own count.
  if (!n.children.empty()) {
    EXPECT_EQ(child_total, n.count);
  }
}

TEST(StateValue, PointAndContains) {
  const auto p = StateValue::point(2.5);
  EXPECT_EQ(p.min, 2.5);
  EXPECT_EQ(p.max, 2.5);
  EXPECT_TRUE(p.contains(2.5));
  EXPECT_FALSE(p.contains(2.6));
}

TEST(StateValue, AbsorbTracksRunningMean) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<double> log{u(rng)};
  StateValue sv = StateValue::point(log[0]);
  for (std::size_t n = 1; n < 200; ++n) {
    const double v = u(rng);
    absorb(sv, v, n);
    log.push_back(v);
    const double mean = std::accumulate(log.begin(), log.end(), 0.0) / log.size();
    ASSERT_NEAR(sv.mean, mean, 1e-9);
    ASSERT_EQ(sv.min, *std::min_element(log.begin(), log.end()));
    ASSERT_EQ(sv.max, *std::max_element(log.begin(), log.end()));
  }
}

TEST(StateValue, HullIsCountWeighted) {
  const StateValue h = hull({1.0, 0.0, 2.0}, 3, {5.0, 4.0, 6.0}, 1);
  EXPECT_EQ(h.min, 0.0);
  EXPECT_EQ(h.max, 6.0);
  EXPECT_DOUBLE_EQ(h.mean, 2.0);
}

TEST(NodeChildLookup, DiscreteEqualityContinuousTolerance) {
  Node n;
  n.children.push_back(Node{StateValue{1.0, 0.5, 1.5}, 1, {}});
  n.children.push_back(Node{StateValue::point(3.0), 1, {}});
  EXPECT_EQ(node_child_lookup(n, 3.0, StateKind::kDiscrete, 0.0), 1u);
  EXPECT_FALSE(node_child_lookup(n, 1.2, StateKind::kDiscrete, 10.0));
  EXPECT_EQ(node_child_lookup(n, 1.2, StateKind::kContinuous, 0.0), 0u);
  EXPECT_EQ(node_child_lookup(n, 1.6, StateKind::kContinuous, 0.2), 0u);
  EXPECT_FALSE(node_child_lookup(n, 1.8, StateKind::kContinuous, 0.2));
}

TEST(RuleTree, EmptyTreeHasNoRules) {
  RuleTree t(continuous_schema(2));
  EXPECT_TRUE(t.to_rules().empty());
  EXPECT_EQ(t.size(), 0u);
}

TEST(RuleTree, IdenticalInsertsAccumulateCount) {
  RuleTree t(continuous_schema(2));
  const std::vector<double> tol{0.0, 0.0};
  for (int k = 0; k < 7; ++k) t.insert(ir({1.0, 2.0}, {1.0}, k), tol);
  const auto rules = t.to_rules();
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].conclusions[0].count, 7u);
  EXPECT_EQ(*rules[0].conditions[0], StateValue::point(1.0));
}

TEST(RuleTree, CloseValuesWidenInterval) {
  RuleTree t(continuous_schema(1));
  const std::vector<double> tol{0.5};
  t.insert(ir({1.0}, {0.0}), tol);
  t.insert(ir({1.4}, {0.0}), tol);
  const auto rules = t.to_rules();
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].conditions[0]->min, 1.0);
  EXPECT_EQ(rules[0].conditions[0]->max, 1.4);
  EXPECT_DOUBLE_EQ(rules[0].conditions[0]->mean, 1.2);
  EXPECT_EQ(rules[0].conclusions[0].count, 2u);
}

TEST(RuleTree, DifferentConclusionsFork) {
  RuleTree t(continuous_schema(1));
  const std::vector<double> tol{0.5};
  t.insert(ir({1.0}, {0.0}), tol);
  t.insert(ir({1.0}, {1.0}), tol);
  const auto rules = t.to_rules();
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].conclusions[0].value, 0.0);
  EXPECT_EQ(rules[1].conclusions[0].value, 1.0);
  // The shared prefix node saw both inserts.
  EXPECT_EQ(t.root().children.size(), 1u);
  EXPECT_EQ(t.root().children[0].count, 2u);
}

TEST(RuleTree, FarValuesCreateNewBranch) {
  RuleTree t(continuous_schema(1));
  const std::vector<double> tol{0.1};
  t.insert(ir({1.0}, {0.0}), tol);
  t.insert(ir({5.0}, {0.0}), tol);
  EXPECT_EQ(t.to_rules().size(), 2u);
}

TEST(RuleTree, SchemaMismatchThrows) {
  RuleTree t(continuous_schema(2));
  const std::vector<double> tol{0.0, 0.0};
  EXPECT_THROW(t.insert(ir({1.0}, {0.0}), tol), StructuralError);
  const std::vector<double> bad{0.0};
  EXPECT_THROW(t.insert(ir({1.0, 2.0}, {0.0}), bad), StructuralError);
  const std::vector<double> neg{-1.0, 0.0};
  EXPECT_THROW(t.insert(ir({1.0, 2.0}, {0.0}), neg), ContractError);
}

TEST(RuleTree, FiftyRandomInsertsLeafCountsSumToFifty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> y(0, 2);
  RuleTree t(continuous_schema(3));
  const std::vector<double> tol{0.5, 0.5, 0.5};
  for (int k = 0; k < 50; ++k) {
    t.insert(ir({u(rng), u(rng), u(rng)}, {static_cast<double>(y(rng))}, k), tol);
  }
  EXPECT_EQ(t.size(), 50u);
  EXPECT_EQ(leaf_count_sum(t), 50u);
  check_node_invariants(t.root(), true);
}

// Property sweep: count conservation, interval invariants and that every
// inserted instance is covered by some rule with its conclusion.
TEST(RuleTree, RandomisedInvariants) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::uniform_int_distribution<int> d(0, 2);
    RuleSchema schema;
    schema.conditions = {{"a", StateKind::kContinuous},
                         {"b", StateKind::kDiscrete},
                         {"c", StateKind::kContinuous}};
    schema.conclusions = {{"y", StateKind::kDiscrete}, {"z", StateKind::kDiscrete}};
    RuleTree t(schema);
    const std::vector<double> tol{0.3, 0.0, 0.3};
    std::vector<InstanceRule> log;
    for (int k = 0; k < 60; ++k) {
      log.push_back(ir({u(rng), static_cast<double>(d(rng)), u(rng)},
                       {static_cast<double>(d(rng)), static_cast<double>(d(rng))}, k));
      t.insert(log.back(), tol);
    }
    ASSERT_EQ(leaf_count_sum(t), log.size());
    check_node_invariants(t.root(), true);
    const auto rules = t.to_rules();
    for (const auto& x : log) {
      bool covered = false;
      for (const auto& r : rules) {
        if (rule_matches(r, x.conditions, schema) && r.conclusion_values() == x.conclusions) {
          covered = true;
        }
      }
      ASSERT_TRUE(covered) << "seed " << seed;
    }
  }
}

// With zero tolerance a leaf's condition means equal the mean of the
// instances that followed exactly that path.
TEST(RuleTree, LeafMeanMatchesInsertionLog) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> v(0, 3);
  RuleTree t(continuous_schema(2));
  const std::vector<double> tol{0.0, 0.0};
  for (int k = 0; k < 100; ++k) {
    t.insert(ir({static_cast<double>(v(rng)), static_cast<double>(v(rng))}, {0.0}), tol);
  }
  for (const auto& r : t.to_rules()) {
    EXPECT_EQ(r.conditions[0]->min, r.conditions[0]->max);
    EXPECT_EQ(r.conditions[0]->mean, r.conditions[0]->min);
  }
  EXPECT_EQ(t.to_rules().size(), 16u);
}

TEST(RuleMatches, AgreesWithBruteForce) {
  std::mt19937_64 rng(17);
  RuleSchema schema;
  schema.conditions = {{"a", StateKind::kContinuous},
                       {"b", StateKind::kDiscrete},
                       {"c", StateKind::kContinuous}};
  schema.conclusions = {{"y", StateKind::kDiscrete}};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> d(0, 2);
  std::bernoulli_distribution drop(0.2);
  for (int trial = 0; trial < 1000; ++trial) {
    Rule r = testing::random_rule(rng, schema, 0.0, 1.0, 0.0);
    for (auto& c : r.conditions) {
      if (drop(rng)) c.reset();
    }
    const std::vector<double> x{u(rng), static_cast<double>(d(rng)), u(rng)};
    bool expected = true;
    if (r.conditions[0] && (x[0] < r.conditions[0]->min || x[0] > r.conditions[0]->max)) {
      expected = false;
    }
    if (r.conditions[1] && x[1] != r.conditions[1]->mean) expected = false;
    if (r.conditions[2] && (x[2] < r.conditions[2]->min || x[2] > r.conditions[2]->max)) {
      expected = false;
    }
    ASSERT_EQ(rule_matches(r, x, schema), expected);
  }
}

TEST(RuleMatches, WrongWidthThrows) {
  const auto schema = continuous_schema(2);
  Rule r;
  r.conditions = {StateValue::point(0), StateValue::point(0)};
  r.conclusions = {{0, 1}};
  const std::vector<double> x{0.0};
  EXPECT_THROW(rule_matches(r, x, schema), StructuralError);
}

TEST(StateKindNames, RoundTrip) {
  EXPECT_EQ(state_kind_from_string(to_string(StateKind::kDiscrete)), StateKind::kDiscrete);
  EXPECT_EQ(state_kind_from_string(to_string(StateKind::kContinuous)), StateKind::kContinuous);
  EXPECT_THROW(state_kind_from_string("banana"), ParseError);
}

}  // namespace
}  // namespace rulehound
