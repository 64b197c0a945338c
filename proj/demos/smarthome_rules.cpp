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

// Trains the light-service agent (v1 by default; pass v2 or v3) and prints
// the rules it follows.

#include <cstdio>
#include <iostream>
#include <string>

#include "rulehound.hpp"

using namespace rulehound;
using namespace rulehound::smarthome;

int main(int argc, char** argv) {
  const Variant v = variant_from_string(argc > 1 ? argv[1] : "v1");
  const EnvConfig env = EnvConfig::defaults(v, 1);
  TrainingConfig tc;
  tc.keep_log = false;
  const TrainingOutcome t = run_training(env, tc);
  std::printf("%s: %zu episodes, %s\n", to_string(v), t.episodes,
              t.converged ? "converged" : "not converged");

  const Dataset seen = simulate_dataset(env, t.agent, 3, 11, Provenance::kSeen);
  const Dataset unseen = simulate_dataset(env, t.agent, 1, 12, Provenance::kUnseen);
  const CycleResult cy = run_extraction_cycle(t.agent, seen, unseen, env, ExtractionConfig{});
  const RuleSet& rs = cy.extraction.rules;
  std::printf("%zu rules\n", rs.rules.size());
  for (const auto& r : rs.rules) std::cout << "  " << render_light_rule(r, rs.schema, env) << '\n';
  std::printf("unseen accuracy %.3f (agent %.3f)\n", cy.metrics.second.accuracy,
              cy.agent_accuracy.second);
  return t.converged ? 0 : 1;
}
