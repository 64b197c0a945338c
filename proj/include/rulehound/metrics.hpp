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

// Four-metric evaluation of an extracted rule set on seen and unseen data:
// rule count, accuracy, similarity (fidelity to the model) and inference
// coverage, plus their average.

#ifndef RULEHOUND_METRICS_HPP_
#define RULEHOUND_METRICS_HPP_

#include <cstddef>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulehound/dataset.hpp"
#include "rulehound/oracle.hpp"
#include "rulehound/pbre.hpp"
#include "rulehound/rxncm.hpp"

namespace rulehound {

struct MetricsReport {
  std::size_t num_rules = 0;
  double accuracy = 0.0;
  double similarity = 0.0;
  double inference = 0.0;
  double average = 0.0;
  std::size_t samples = 0;
  std::size_t inferred = 0;
};

struct EvalOptions {
  // Uninferred samples are left out of the accuracy and similarity
  // denominators; they only lower inference coverage.
  bool exclude_uninferred = true;
};

using InferFn = std::function<std::optional<std::vector<double>>(const Sample&)>;
// Whether derived conclusions are "correct" for a sample. The default
// compares them with the sample's targets.
using JudgeFn = std::function<bool(const Sample&, const std::vector<double>&)>;

inline MetricsReport evaluate_split(std::size_t num_rules, const InferFn& infer_fn,
                                    const OracleModel& model, const Dataset& data,
                                    const JudgeFn& judge = {},
                                    const EvalOptions& opts = {}) {
  MetricsReport m;
  m.num_rules = num_rules;
  m.samples = data.size();
  std::size_t correct = 0, faithful = 0;
  for (const auto& s : data.samples) {
    const auto y = infer_fn(s);
    if (!y) continue;
    ++m.inferred;
    if (judge ? judge(s, *y) : *y == s.targets) ++correct;
    if (model.predict(s.states) == *y) ++faithful;
  }
  const double denom = static_cast<double>(opts.exclude_uninferred ? m.inferred : m.samples);
  if (denom > 0.0) {
    m.accuracy = static_cast<double>(correct) / denom;
    m.similarity = static_cast<double>(faithful) / denom;
  }
  if (m.samples > 0) {
    m.inference = static_cast<double>(m.inferred) / static_cast<double>(m.samples);
  }
  m.average = (m.accuracy + m.similarity + m.inference) / 3.0;
  return m;
}

inline std::pair<MetricsReport, MetricsReport> evaluate(
    const RuleSet& rs, const OracleModel& model, const Dataset& seen,
    const Dataset& unseen, const ExtractionConfig& cfg, const JudgeFn& judge = {},
    const EvalOptions& opts = {}) {
  if (seen.schema.rule_schema() != rs.schema) {
    throw StructuralError("evaluate: rule set and dataset schemas differ");
  }
  const InferFn fn = [&](const Sample& s) { return infer(rs, s.states, cfg.epsilon_corr); };
  return {evaluate_split(rs.rules.size(), fn, model, seen, judge, opts),
          evaluate_split(rs.rules.size(), fn, model, unseen, judge, opts)};
}

inline std::pair<MetricsReport, MetricsReport> evaluate(
    const RxRuleSet& rs, const OracleModel& model, const Dataset& seen,
    const Dataset& unseen, const JudgeFn& judge = {}, const EvalOptions& opts = {}) {
  if (seen.schema.rule_schema() != rs.schema) {
    throw StructuralError("evaluate: rule set and dataset schemas differ");
  }
  const InferFn fn = [&](const Sample& s) -> std::optional<std::vector<double>> {
    const auto y = rx_infer(rs, s.states);
    if (!y) return std::nullopt;
    return std::vector<double>{*y};
  };
  return {evaluate_split(rs.rules.size(), fn, model, seen, judge, opts),
          evaluate_split(rs.rules.size(), fn, model, unseen, judge, opts)};
}

inline std::string metrics_csv_header() {
  return "dataset,method,split,numRules,accuracy,similarity,inference,average";
}

inline std::string format_fraction(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string metrics_csv_row(const std::string& dataset, const std::string& method,
                                   const std::string& split, const MetricsReport& m) {
  return dataset + "," + method + "," + split + "," + std::to_string(m.num_rules) + "," +
         format_fraction(m.accuracy) + "," + format_fraction(m.similarity) + "," +
         format_fraction(m.inference) + "," + format_fraction(m.average);
}

inline nlohmann::json to_json(const MetricsReport& m) {
  return {{"numRules", m.num_rules},   {"accuracy", m.accuracy},
          {"similarity", m.similarity}, {"inference", m.inference},
          {"average", m.average},       {"samples", m.samples},
          {"inferred", m.inferred}};
}

}  // namespace rulehound

#endif  // RULEHOUND_METRICS_HPP_
