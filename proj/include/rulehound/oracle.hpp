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

// The black-box contract rule extractors are written against.

#ifndef RULEHOUND_ORACLE_HPP_
#define RULEHOUND_ORACLE_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rulehound/error.hpp"

namespace rulehound {

// Maps raw (unnormalised) input states to one value per conclusion state:
// a class label for classifiers, one state index per actuator for agents.
class OracleModel {
 public:
  virtual ~OracleModel() = default;
  virtual std::vector<double> predict(std::span<const double> states) const = 0;
};

class FunctionOracle final : public OracleModel {
 public:
  using Fn = std::function<std::vector<double>(std::span<const double>)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  std::vector<double> predict(std::span<const double> states) const override {
    return fn_(states);
  }

 private:
  Fn fn_;
};

// Index of the largest entry; ties resolve to the lowest index.
inline std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ContractError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Greedy state per actuator from its vector of Q-values.
inline std::vector<std::size_t> select_actuator_states(
    const std::vector<std::vector<double>>& q) {
  std::vector<std::size_t> chosen;
  chosen.reserve(q.size());
  for (const auto& head : q) chosen.push_back(argmax(head));
  return chosen;
}

// Same, for a flat output vector laid out head after head.
inline std::vector<std::size_t> select_actuator_states(
    std::span<const double> flat, std::span<const std::size_t> head_sizes) {
  std::vector<std::size_t> chosen;
  std::size_t offset = 0;
  for (std::size_t h : head_sizes) {
    if (offset + h > flat.size()) {
      throw StructuralError("Q-vector shorter than the declared heads");
    }
    chosen.push_back(argmax(flat.subspan(offset, h)));
    offset += h;
  }
  if (offset != flat.size()) {
    throw StructuralError("Q-vector longer than the declared heads");
  }
  return chosen;
}

}  // namespace rulehound

#endif  // RULEHOUND_ORACLE_HPP_
