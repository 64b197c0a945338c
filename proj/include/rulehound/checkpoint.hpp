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

// Model checkpoints: a JSON header (kind, layer sizes, activations, seed,
// feature encoder) followed by the flat parameter array. Doubles are
// written in shortest round-trip form, so a reload predicts bit-exactly.

#ifndef RULEHOUND_CHECKPOINT_HPP_
#define RULEHOUND_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulehound/dqn.hpp"
#include "rulehound/error.hpp"
#include "rulehound/mlp.hpp"

namespace rulehound {

inline nlohmann::json to_json(const FeatureEncoder& enc) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& f : enc.fields()) {
    j.push_back({{"kind", to_string(f.kind)}, {"lo", f.lo}, {"hi", f.hi}, {"levels", f.levels}});
  }
  return j;
}

inline FeatureEncoder encoder_from_json(const nlohmann::json& j) {
  std::vector<FeatureEncoder::Field> fields;
  for (const auto& e : j) {
    FeatureEncoder::Field f;
    f.kind = state_kind_from_string(e.at("kind").get<std::string>());
    f.lo = e.at("lo").get<double>();
    f.hi = e.at("hi").get<double>();
    f.levels = e.at("levels").get<std::size_t>();
    fields.push_back(f);
  }
  return FeatureEncoder(std::move(fields));
}

inline nlohmann::json to_json(const Mlp& net) {
  nlohmann::json j;
  j["layers"] = net.sizes();
  std::vector<std::string> acts;
  for (auto a : net.activations()) acts.emplace_back(to_string(a));
  j["activations"] = acts;
  j["seed"] = net.seed();
  j["params"] = net.parameters();
  return j;
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  std::vector<Activation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(activation_from_string(a.get<std::string>()));
  Mlp net = Mlp::zeros(j.at("layers").get<std::vector<std::size_t>>(), acts);
  const auto params = j.at("params").get<std::vector<double>>();
  net.set_parameters(params);
  net.set_seed(j.value("seed", std::uint64_t{0}));
  return net;
}

inline nlohmann::json checkpoint_json(const MlpClassifier& m) {
  nlohmann::json j = to_json(m.net());
  j["format"] = "rulehound-checkpoint";
  j["kind"] = "classifier";
  j["encoder"] = to_json(m.encoder());
  return j;
}

inline nlohmann::json checkpoint_json(const DqnAgent& a) {
  nlohmann::json j = to_json(a.online());
  j["format"] = "rulehound-checkpoint";
  j["kind"] = "dqn";
  j["encoder"] = to_json(a.encoder());
  j["heads"] = a.heads();
  const DqnConfig& c = a.config();
  j["dqn"] = {{"gamma", c.gamma},           {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size}, {"sync_every", c.sync_every},
              {"buffer_capacity", c.buffer_capacity}, {"seed", c.seed}};
  return j;
}

inline std::string checkpoint_kind(const nlohmann::json& j) {
  if (j.value("format", "") != "rulehound-checkpoint") {
    throw ParseError("not a rulehound checkpoint");
  }
  return j.at("kind").get<std::string>();
}

inline MlpClassifier classifier_from_checkpoint(const nlohmann::json& j) {
  try {
    if (checkpoint_kind(j) != "classifier") throw ParseError("checkpoint is not a classifier");
    return MlpClassifier(mlp_from_json(j), encoder_from_json(j.at("encoder")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

inline DqnAgent agent_from_checkpoint(const nlohmann::json& j) {
  try {
    if (checkpoint_kind(j) != "dqn") throw ParseError("checkpoint is not a DQN agent");
    DqnConfig c;
    const auto& d = j.at("dqn");
    c.gamma = d.at("gamma").get<double>();
    c.learning_rate = d.at("learning_rate").get<double>();
    c.batch_size = d.at("batch_size").get<std::size_t>();
    c.sync_every = d.at("sync_every").get<std::size_t>();
    c.buffer_capacity = d.at("buffer_capacity").get<std::size_t>();
    c.seed = d.at("seed").get<std::uint64_t>();
    Mlp net = mlp_from_json(j);
    const auto sizes = net.sizes();
    c.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
    return DqnAgent(std::move(net), encoder_from_json(j.at("encoder")),
                    j.at("heads").get<std::vector<std::size_t>>(), c);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

}  // namespace rulehound

#endif  // RULEHOUND_CHECKPOINT_HPP_
