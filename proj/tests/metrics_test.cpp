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
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rulehound/metrics.hpp"
#include "rulehound/pbre.hpp"
#include "test_util.hpp"

namespace rulehound {
namespace {

Dataset line_data(std::size_t n) {
  Dataset d{testing::continuous_data_schema(1), {}, Provenance::kFull};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    d.samples.push_back({{x}, {x >= 0.5 ? 1.0 : 0.0}, {}});
  }
  return d;
}

const FunctionOracle kStep([](std::span<const double> x) {
  return std::vector<double>{x[0] >= 0.5 ? 1.0 : 0.0};
});

TEST(EvaluateSplit, ExactRulesScoreOne) {
  const Dataset d = line_data(20);
  const InferFn fn = [](const Sample& s) -> std::optional<std::vector<double>> {
    return kStep.predict(s.states);
  };
  const MetricsReport m = evaluate_split(2, fn, kStep, d);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.similarity, 1.0);
  EXPECT_EQ(m.inference, 1.0);
  EXPECT_EQ(m.average, 1.0);
  EXPECT_EQ(m.num_rules, 2u);
}

TEST(EvaluateSplit, HalfAbstainingGivesHalfCoverage) {
  const Dataset d = line_data(20);
  const InferFn fn = [](const Sample& s) -> std::optional<std::vector<double>> {
    if (s.states[0] < 0.5) return std::nullopt;
    return std::vector<double>{1.0};
  };
  const MetricsReport m = evaluate_split(1, fn, kStep, d);
  EXPECT_DOUBLE_EQ(m.inference, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);  // abstentions excluded
  EXPECT_DOUBLE_EQ(m.average, (1.0 + 1.0 + 0.5) / 3.0);

  EvalOptions incl;
  incl.exclude_uninferred = false;
  const MetricsReport n = evaluate_split(1, fn, kStep, d, {}, incl);
  EXPECT_DOUBLE_EQ(n.accuracy, 0.5);
}

TEST(EvaluateSplit, SimilarityAgainstModelAccuracyAgainstTargets) {
  Dataset d = line_data(10);
  for (auto& s : d.samples) s.targets = {0.0};  // labels disagree with the model
  const InferFn fn = [](const Sample& s) -> std::optional<std::vector<double>> {
    return kStep.predict(s.states);
  };
  const MetricsReport m = evaluate_split(2, fn, kStep, d);
  EXPECT_DOUBLE_EQ(m.similarity, 1.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
}

TEST(EvaluateSplit, JudgeOverridesTargetComparison) {
  const Dataset d = line_data(10);
  const InferFn fn = [](const Sample&) -> std::optional<std::vector<double>> {
    return std::vector<double>{7.0};
  };
  const JudgeFn always = [](const Sample&, const std::vector<double>&) { return true; };
  EXPECT_DOUBLE_EQ(evaluate_split(1, fn, kStep, d, always).accuracy, 1.0);
}

TEST(EvaluateSplit, PermutationInvariant) {
  Dataset d = line_data(30);
  const InferFn fn = [](const Sample& s) -> std::optional<std::vector<double>> {
    if (s.states[0] > 0.8) return std::nullopt;
    return std::vector<double>{s.states[0] > 0.3 ? 1.0 : 0.0};
  };
  const MetricsReport a = evaluate_split(3, fn, kStep, d);
  std::mt19937_64 rng(1);
  std::shuffle(d.samples.begin(), d.samples.end(), rng);
  const MetricsReport b = evaluate_split(3, fn, kStep, d);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.similarity, b.similarity);
  EXPECT_EQ(a.inference, b.inference);
}

TEST(Evaluate, SchemaMismatchThrows) {
  const Dataset d = line_data(10);
  RuleSet rs;
  rs.schema = testing::continuous_schema(2);
  EXPECT_THROW(evaluate(rs, kStep, d, d, ExtractionConfig{}), StructuralError);
}

TEST(Evaluate, PbreCoversSeenAndCombineShrinks) {
  const auto [seen, unseen] = split_seen_unseen(line_data(200), 0.8, 1);
  const auto ex = extract(kStep, seen, unseen, ExtractionConfig{});
  const auto [ms, mu] = evaluate(ex.combined, kStep, seen, unseen, ExtractionConfig{});
  EXPECT_DOUBLE_EQ(ms.inference, 1.0);
  EXPECT_DOUBLE_EQ(ms.similarity, 1.0);
  EXPECT_LE(ex.combined.rules.size(), ex.generalized_rules);
  EXPECT_GE(mu.inference, 0.9);
}

TEST(Csv, HeaderAndRowFormat) {
  EXPECT_EQ(metrics_csv_header(),
            "dataset,method,split,numRules,accuracy,similarity,inference,average");
  MetricsReport m;
  m.num_rules = 3;
  m.accuracy = 0.5;
  m.similarity = 1.0;
  m.inference = 0.25;
  m.average = (0.5 + 1.0 + 0.25) / 3;
  EXPECT_EQ(metrics_csv_row("iris", "pbre", "seen", m),
            "iris,pbre,seen,3,0.500000,1.000000,0.250000,0.583333");
}

}  // namespace
}  // namespace rulehound
