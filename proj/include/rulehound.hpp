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

#ifndef RULEHOUND_RULEHOUND_HPP_
#define RULEHOUND_RULEHOUND_HPP_

#include "rulehound/checkpoint.hpp"
#include "rulehound/dataset.hpp"
#include "rulehound/dqn.hpp"
#include "rulehound/error.hpp"
#include "rulehound/metrics.hpp"
#include "rulehound/mlp.hpp"
#include "rulehound/oracle.hpp"
#include "rulehound/pbre.hpp"
#include "rulehound/render.hpp"
#include "rulehound/rule_model.hpp"
#include "rulehound/rules_io.hpp"
#include "rulehound/rxncm.hpp"
#include "rulehound/smarthome.hpp"
#include "rulehound/stats.hpp"

#endif  // RULEHOUND_RULEHOUND_HPP_
