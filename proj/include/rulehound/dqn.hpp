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

// Multi-head deep Q-network: one output head per actuator, experience
// replay and a periodically synchronised target network.

#ifndef RULEHOUND_DQN_HPP_
#define RULEHOUND_DQN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rulehound/error.hpp"
#include "rulehound/mlp.hpp"
#include "rulehound/oracle.hpp"

namespace rulehound {

struct Transition {
  std::vector<double> states;
  std::vector<std::size_t> actions;  // one state index per actuator
  double reward = 0.0;
  std::vector<double> next_states;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("replay buffer capacity must be > 0");
    ring_.reserve(capacity);
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }

  void push(Transition t) {
    if (!ring_.empty() && (t.states.size() != ring_.front().states.size() ||
                           t.actions.size() != ring_.front().actions.size() ||
                           t.next_states.size() != ring_.front().next_states.size())) {
      throw StructuralError("transition shape differs from buffered ones");
    }
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  // Uniform sample of min(n, size()) distinct transitions.
  template <class Rng>
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const {
    n = std::min(n, ring_.size());
    std::vector<const Transition*> out;
    out.reserve(n);
    // Partial Fisher-Yates over an index vector.
    scratch_.resize(ring_.size());
    std::iota(scratch_.begin(), scratch_.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, scratch_.size() - 1);
      std::swap(scratch_[i], scratch_[pick(rng)]);
      out.push_back(&ring_[scratch_[i]]);
    }
    return out;
  }

  const Transition& operator[](std::size_t i) const { return ring_[i]; }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> ring_;
  mutable std::vector<std::size_t> scratch_;
};

struct DqnConfig {
  std::vector<std::size_t> hidden{32, 32};
  double gamma = 0.5;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t sync_every = 100;  // train steps between target syncs
  std::size_t buffer_capacity = 20000;
  std::uint64_t seed = 1;
};

// One gradient step on the squared TD error of every head:
//   y_h = r + gamma * max_a' Q_target_h(s', a')
//   loss = mean_batch sum_h (Q_h(s, a_h) - y_h)^2 / 2
// `heads` gives the width of each head in the flat network output.
// Returns the batch loss.
inline double td_update(Mlp& online, const Mlp& target,
                        std::span<const std::size_t> heads,
                        const Eigen::MatrixXd& states,
                        const std::vector<std::vector<std::size_t>>& actions,
                        std::span<const double> rewards,
                        const Eigen::MatrixXd& next_states, double gamma,
                        Adam& opt) {
  const auto n = states.cols();
  if (n == 0) throw ContractError("td_update: empty batch");
  Mlp::Cache cache;
  const Eigen::MatrixXd q = online.forward_batch(states, cache);
  const Eigen::MatrixXd q_next = target.forward_batch(next_states);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index offset = 0;
    const auto& a = actions[static_cast<std::size_t>(j)];
    for (std::size_t h = 0; h < heads.size(); ++h) {
      const auto width = static_cast<Eigen::Index>(heads[h]);
      const double best_next = q_next.col(j).segment(offset, width).maxCoeff();
      const double y = rewards[static_cast<std::size_t>(j)] + gamma * best_next;
      const Eigen::Index row = offset + static_cast<Eigen::Index>(a[h]);
      const double err = q(row, j) - y;
      loss += 0.5 * err * err;
      grad(row, j) = err;
      offset += width;
    }
  }
  loss /= static_cast<double>(n);
  grad /= static_cast<double>(n);
  if (!std::isfinite(loss)) throw TrainingError("non-finite TD loss");
  opt.step(online, online.backward(cache, grad));
  if (!online.finite()) throw TrainingError("Q-network parameters diverged");
  return loss;
}

class DqnAgent final : public OracleModel {
 public:
  DqnAgent() = default;

  DqnAgent(FeatureEncoder encoder, std::vector<std::size_t> heads,
           const DqnConfig& cfg)
      : encoder_(std::move(encoder)), heads_(std::move(heads)), cfg_(cfg),
        opt_(cfg.learning_rate) {
    if (heads_.empty()) throw ContractError("agent needs at least one actuator head");
    std::vector<std::size_t> sizes{encoder_.width()};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(std::accumulate(heads_.begin(), heads_.end(), std::size_t{0}));
    std::vector<Activation> acts(cfg.hidden.size(), Activation::kTanh);
    acts.push_back(Activation::kIdentity);
    online_ = Mlp(sizes, acts, cfg.seed);
    target_ = online_;
  }

  // Restores a trained agent; the target network mirrors the online one.
  DqnAgent(Mlp net, FeatureEncoder encoder, std::vector<std::size_t> heads,
           const DqnConfig& cfg)
      : online_(std::move(net)), encoder_(std::move(encoder)),
        heads_(std::move(heads)), cfg_(cfg), opt_(cfg.learning_rate) {
    target_ = online_;
  }

  const Mlp& online() const { return online_; }
  Mlp& online() { return online_; }
  const Mlp& target() const { return target_; }
  const FeatureEncoder& encoder() const { return encoder_; }
  const std::vector<std::size_t>& heads() const { return heads_; }
  const DqnConfig& config() const { return cfg_; }
  std::size_t train_steps() const { return steps_; }

  std::vector<double> q_flat(std::span<const double> states) const {
    const Eigen::VectorXd y = online_.forward(encoder_.encode(states));
    return {y.data(), y.data() + y.size()};
  }

  std::vector<std::vector<double>> q_values(std::span<const double> states) const {
    const auto flat = q_flat(states);
    std::vector<std::vector<double>> out;
    std::size_t offset = 0;
    for (std::size_t h : heads_) {
      out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                       flat.begin() + static_cast<std::ptrdiff_t>(offset + h));
      offset += h;
    }
    return out;
  }

  std::vector<std::size_t> greedy(std::span<const double> states) const {
    return select_actuator_states(q_flat(states), heads_);
  }

  std::vector<double> predict(std::span<const double> states) const override {
    const auto a = greedy(states);
    return {a.begin(), a.end()};
  }

  // One update on `batch`; every `sync_every` updates the target network
  // is overwritten with the online one.
  double train_step(std::span<const Transition* const> batch) {
    if (batch.empty()) throw ContractError("train_step: empty batch");
    const auto n = static_cast<Eigen::Index>(batch.size());
    const auto w = static_cast<Eigen::Index>(encoder_.width());
    Eigen::MatrixXd s(w, n), s2(w, n);
    std::vector<std::vector<std::size_t>> actions;
    std::vector<double> rewards;
    actions.reserve(batch.size());
    rewards.reserve(batch.size());
    for (Eigen::Index j = 0; j < n; ++j) {
      const Transition& t = *batch[static_cast<std::size_t>(j)];
      encoder_.encode_into(t.states, s.col(j).data());
      encoder_.encode_into(t.next_states, s2.col(j).data());
      actions.push_back(t.actions);
      rewards.push_back(t.reward);
    }
    const double loss =
        td_update(online_, target_, heads_, s, actions, rewards, s2, cfg_.gamma, opt_);
    if (++steps_ % std::max<std::size_t>(1, cfg_.sync_every) == 0) target_ = online_;
    return loss;
  }

  void sync_target() { target_ = online_; }

 private:
  Mlp online_;
  Mlp target_;
  FeatureEncoder encoder_;
  std::vector<std::size_t> heads_;
  DqnConfig cfg_;
  Adam opt_;
  std::size_t steps_ = 0;
};

// Epsilon-greedy action: with probability epsilon every actuator takes a
// uniformly random state, otherwise the greedy state.
template <class Rng>
std::vector<std::size_t> dqn_act(const DqnAgent& agent, std::span<const double> states,
                                 double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (epsilon > 0.0 && coin(rng) < epsilon) {
    std::vector<std::size_t> a;
    a.reserve(agent.heads().size());
    for (std::size_t h : agent.heads()) {
      std::uniform_int_distribution<std::size_t> pick(0, h - 1);
      a.push_back(pick(rng));
    }
    return a;
  }
  return agent.greedy(states);
}

inline double dqn_train_step(DqnAgent& agent, std::span<const Transition* const> batch) {
  return agent.train_step(batch);
}

}  // namespace rulehound

#endif  // RULEHOUND_DQN_HPP_
