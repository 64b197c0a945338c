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
#include <map>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "rulehound/dqn.hpp"

namespace rulehound {
namespace {

FeatureEncoder unit_encoder(std::size_t n) {
  return FeatureEncoder(std::vector<FeatureEncoder::Field>(n, FeatureEncoder::Field{}));
}

DqnConfig small_cfg(std::uint64_t seed = 1) {
  DqnConfig c;
  c.hidden = {8};
  c.seed = seed;
  return c;
}

TEST(ReplayBuffer, EvictsOldestAtCapacity) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push({{double(i)}, {0}, double(i), {0.0}});
  ASSERT_EQ(buf.size(), 3u);
  std::multiset<double> rewards;
  for (std::size_t i = 0; i < buf.size(); ++i) rewards.insert(buf[i].reward);
  EXPECT_EQ(rewards, (std::multiset<double>{2, 3, 4}));
}

TEST(ReplayBuffer, SampleIsDistinctAndBounded) {
  ReplayBuffer buf(100);
  for (int i = 0; i < 10; ++i) buf.push({{double(i)}, {0}, 0, {0.0}});
  std::mt19937_64 rng(3);
  auto s = buf.sample(4, rng);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(std::set<const Transition*>(s.begin(), s.end()).size(), 4u);
  EXPECT_EQ(buf.sample(50, rng).size(), 10u);
}

TEST(ReplayBuffer, Contracts) {
  EXPECT_THROW(ReplayBuffer(0), ContractError);
  ReplayBuffer buf(4);
  buf.push({{0.0}, {0}, 0, {0.0}});
  EXPECT_THROW(buf.push({{0.0, 1.0}, {0}, 0, {0.0, 1.0}}), StructuralError);
}

TEST(Dqn, ZeroEpsilonIsGreedy) {
  DqnAgent agent(unit_encoder(2), {5, 3}, small_cfg());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> s{u(rng), u(rng)};
    const auto a = dqn_act(agent, s, 0.0, rng);
    ASSERT_EQ(a, agent.greedy(s));
    const auto q = agent.q_values(s);
    for (std::size_t h = 0; h < q.size(); ++h) {
      ASSERT_EQ(a[h], static_cast<std::size_t>(
                          std::max_element(q[h].begin(), q[h].end()) - q[h].begin()));
    }
  }
}

TEST(Dqn, FullEpsilonIsUniformOverJointActions) {
  DqnAgent agent(unit_encoder(2), {5, 3}, small_cfg());
  std::mt19937_64 rng(11);
  const std::vector<double> s{0.3, 0.7};
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  const int n = 15000;
  for (int i = 0; i < n; ++i) {
    const auto a = dqn_act(agent, s, 1.0, rng);
    ++counts[{a[0], a[1]}];
  }
  ASSERT_EQ(counts.size(), 15u);
  const double expected = n / 15.0;
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 14 degrees of freedom, p = 0.001.
  EXPECT_LT(chi2, 36.12);
}

TEST(Dqn, SeedReproducesTraining) {
  auto run = [](std::uint64_t seed) {
    DqnAgent agent(unit_encoder(1), {2}, small_cfg(seed));
    ReplayBuffer buf(64);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 64; ++i) {
      const double x = (i % 8) / 8.0;
      buf.push({{x}, {std::size_t(i % 2)}, x, {x}});
    }
    for (int i = 0; i < 50; ++i) agent.train_step(buf.sample(16, rng));
    return agent.online().parameters();
  };
  EXPECT_EQ(run(4), run(4));
  EXPECT_NE(run(4), run(5));
}

TEST(Dqn, ZeroGammaMovesTowardReward) {
  DqnConfig cfg = small_cfg();
  cfg.gamma = 0.0;
  cfg.learning_rate = 1e-2;
  DqnAgent agent(unit_encoder(1), {2}, cfg);
  const Transition t{{0.5}, {1}, 2.0, {0.5}};
  const std::vector<const Transition*> batch{&t};
  const double before = std::abs(agent.q_values(t.states)[0][1] - 2.0);
  double prev = before;
  for (int i = 0; i < 500; ++i) {
    agent.train_step(batch);
    if (i % 50 == 49) {
      const double now = std::abs(agent.q_values(t.states)[0][1] - 2.0);
      EXPECT_LE(now, prev + 1e-9);
      prev = now;
    }
  }
  EXPECT_LT(prev, 0.01);
  EXPECT_LT(prev, before);
}

TEST(Dqn, SingleStateFixedPoint) {
  DqnConfig cfg = small_cfg();
  cfg.gamma = 0.9;
  cfg.learning_rate = 1e-2;
  cfg.sync_every = 200;
  DqnAgent agent(unit_encoder(1), {1}, cfg);
  const Transition t{{0.5}, {0}, 1.0, {0.5}};
  const std::vector<const Transition*> batch{&t};
  for (int i = 0; i < 40000; ++i) agent.train_step(batch);
  const double q = agent.q_values(t.states)[0][0];
  EXPECT_NEAR(q, 1.0 / (1.0 - cfg.gamma), 0.01 * 10.0);
}

TEST(Dqn, TdLossHasKnownValue) {
  Mlp online = Mlp::zeros({1, 2}, {Activation::kIdentity});
  online.set_parameters(std::vector<double>{0.0, 0.0, 1.0, 3.0});
  const Mlp target = online;
  Adam opt(0.0);
  Eigen::MatrixXd s(1, 1);
  s << 0.0;
  const std::vector<std::size_t> heads{2};
  const std::vector<double> r{0.5};
  // y = 0.5 + 0.5 * max(1, 3) = 2; Q(s, 0) = 1; loss = (1 - 2)^2 / 2.
  const double loss = td_update(online, target, heads, s, {{0}}, r, s, 0.5, opt);
  EXPECT_NEAR(loss, 0.5, 1e-12);
}

TEST(Dqn, PredictReturnsGreedyActions) {
  DqnAgent agent(unit_encoder(1), {3, 2}, small_cfg(8));
  const std::vector<double> s{0.2};
  const auto g = agent.greedy(s);
  const auto p = agent.predict(s);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], double(g[0]));
  EXPECT_EQ(p[1], double(g[1]));
}

}  // namespace
}  // namespace rulehound
