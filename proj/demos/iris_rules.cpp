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

// Trains a classifier on Iris, distills it with PBRE and RxNCM and prints
// both rule sets with their metrics.

#include <cstdio>
#include <iostream>

#include "rulehound.hpp"

using namespace rulehound;

static void print_metrics(const char* label, const std::pair<MetricsReport, MetricsReport>& m) {
  std::printf("%-6s seen: accuracy %.3f similarity %.3f coverage %.3f\n", label,
              m.first.accuracy, m.first.similarity, m.first.inference);
  std::printf("%-6s unseen: accuracy %.3f similarity %.3f coverage %.3f\n", label,
              m.second.accuracy, m.second.similarity, m.second.inference);
}

int main() {
  const std::string dir = RULEHOUND_DATA_DIR;
  const Dataset iris = load_csv(dir + "/iris.csv", load_schema(dir + "/iris.schema.json"));
  const auto [seen, unseen] = split_seen_unseen(iris, 0.8, 1);
  const auto fit = train_classifier(seen, TrainConfig{});
  std::printf("MLP train accuracy %.3f\n\n", fit.report.train_accuracy);

  const ExtractionConfig cfg;
  const Extraction ex = extract(fit.model, seen, unseen, cfg);
  std::printf("PBRE: %zu instance rules, %zu generalised, %zu after combination, %zu final\n",
              ex.instance_rules, ex.generalized_rules, ex.combined.rules.size(),
              ex.rules.rules.size());
  for (const auto& r : ex.rules.rules) std::cout << "  " << render_rule(r, ex.rules.schema) << '\n';
  for (std::size_t s : ex.rules.insignificant) {
    std::cout << "  (dropped " << ex.rules.schema.conditions[s].name << ")\n";
  }
  print_metrics("PBRE", evaluate(ex.rules, fit.model, seen, unseen, cfg));

  const RxExtraction rx = rxncm_extract(fit.model, seen, unseen);
  std::printf("\nRxNCM: %zu rules\n", rx.rules.rules.size());
  for (const auto& r : rx.rules.rules) std::cout << "  " << render_rule(r, rx.rules.schema) << '\n';
  print_metrics("RxNCM", evaluate(rx.rules, fit.model, seen, unseen));
}
