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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "rulehound/checkpoint.hpp"
#include "rulehound/render.hpp"
#include "rulehound/rules_io.hpp"
#include "rulehound/smarthome.hpp"
#include "test_util.hpp"

namespace rulehound {
namespace {

struct IrisFixture : ::testing::Test {
  static void SetUpTestSuite() {
    const auto iris = testing::load_named("iris");
    auto [s, u] = split_seen_unseen(iris, 0.8, 3);
    seen = std::move(s);
    unseen = std::move(u);
    model = train_classifier(seen, TrainConfig{}).model;
  }
  static inline Dataset seen, unseen;
  static inline MlpClassifier model;
};

TEST_F(IrisFixture, PbreRuleSetRoundTripsThroughText) {
  const auto ex = extract(model, seen, unseen, ExtractionConfig{});
  const auto text = to_json(ex.rules).dump();
  const RuleSet back = rule_set_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.schema, ex.rules.schema);
  EXPECT_EQ(back.rules, ex.rules.rules);
  EXPECT_EQ(back.insignificant, ex.rules.insignificant);
  EXPECT_EQ(back.correlations.entries, ex.rules.correlations.entries);
  for (const auto& s : unseen.samples) {
    EXPECT_EQ(infer(back, s.states, 1e-3), infer(ex.rules, s.states, 1e-3));
  }
}

TEST_F(IrisFixture, RxRuleSetRoundTripsThroughText) {
  const auto ex = rxncm_extract(model, seen, unseen);
  const RxRuleSet back = rx_rule_set_from_json(nlohmann::json::parse(to_json(ex.rules).dump()));
  EXPECT_EQ(back.schema, ex.rules.schema);
  EXPECT_EQ(back.attributes, ex.rules.attributes);
  EXPECT_EQ(back.rules, ex.rules.rules);
  for (const auto& s : unseen.samples) {
    EXPECT_EQ(rx_infer(back, s.states), rx_infer(ex.rules, s.states));
  }
}

TEST_F(IrisFixture, FormatsAreNotInterchangeable) {
  const auto ex = extract(model, seen, unseen, ExtractionConfig{});
  EXPECT_THROW(rx_rule_set_from_json(to_json(ex.rules)), ParseError);
  EXPECT_THROW(rule_set_from_json(nlohmann::json{{"format", "pbre"}}), ParseError);
}

TEST_F(IrisFixture, ClassifierCheckpointPredictsBitExactly) {
  const auto path = std::filesystem::temp_directory_path() / "rulehound_io_clf.json";
  write_json(path.string(), checkpoint_json(model));
  const MlpClassifier back = classifier_from_checkpoint(read_json(path.string()));
  EXPECT_EQ(back.net().parameters(), model.net().parameters());
  for (const auto& s : seen.samples) {
    const auto a = model.scores(s.states);
    const auto b = back.scores(s.states);
    ASSERT_EQ(a, b);
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, DqnAgentPredictsBitExactly) {
  using namespace smarthome;
  EnvConfig c = EnvConfig::defaults(Variant::kV2, 1);
  DqnConfig d;
  d.seed = 7;
  const DqnAgent agent = make_light_agent(c, d);
  const DqnAgent back = agent_from_checkpoint(nlohmann::json::parse(checkpoint_json(agent).dump()));
  EXPECT_EQ(back.heads(), agent.heads());
  EXPECT_EQ(back.config().seed, 7u);
  for (int us = 0; us < 4; ++us) {
    for (double le = 0; le <= 605; le += 55) {
      const std::vector<double> s{double(us), le};
      ASSERT_EQ(back.q_flat(s), agent.q_flat(s));
    }
  }
}

TEST(Checkpoint, RejectsForeignDocuments) {
  EXPECT_THROW(classifier_from_checkpoint(nlohmann::json{{"format", "x"}}), ParseError);
  EXPECT_THROW(agent_from_checkpoint(nlohmann::json{{"format", "rulehound-checkpoint"},
                                                    {"kind", "classifier"}}),
               ParseError);
  EXPECT_THROW(read_json("/nonexistent/rulehound.json"), ParseError);
  const auto path = std::filesystem::temp_directory_path() / "rulehound_io_bad.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(read_json(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST(Render, PbreRuleText) {
  const RuleSchema schema{{{"len", StateKind::kContinuous}, {"kind", StateKind::kDiscrete}},
                          {{"class", StateKind::kDiscrete}}};
  Rule r;
  r.conditions = {StateValue{1.5, 1.0, 2.0}, StateValue{3, 3, 3}};
  r.conclusions = {Conclusion{2, 12}};
  EXPECT_EQ(render_rule(r, schema),
            "if len in [1, 2] (avg 1.5), and kind = 3, then class = 2 (count 12)");
  r.conditions = {std::nullopt, std::nullopt};
  EXPECT_EQ(render_rule(r, schema), "if always, then class = 2 (count 12)");
}

TEST(Render, RxRuleText) {
  const RuleSchema schema{{{"a", StateKind::kContinuous}, {"b", StateKind::kContinuous}},
                          {{"y", StateKind::kDiscrete}}};
  RxRule r{{std::nullopt, Interval{0.25, 7}}, 1};
  EXPECT_EQ(render_rule(r, schema), "if b in [0.25, 7], then y = 1");
}

}  // namespace
}  // namespace rulehound
