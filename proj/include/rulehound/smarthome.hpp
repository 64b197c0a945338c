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

// Simulated single-service smart home: an inhabitant whose activity is
// drawn uniformly at every step, Gaussian daylight, a dimmable lamp and a
// three-position curtain. A DQN light service is trained against the
// inhabitant's habitual behaviours and then distilled into rules.

#ifndef RULEHOUND_SMARTHOME_HPP_
#define RULEHOUND_SMARTHOME_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rulehound/dataset.hpp"
#include "rulehound/dqn.hpp"
#include "rulehound/error.hpp"
#include "rulehound/metrics.hpp"
#include "rulehound/pbre.hpp"

namespace rulehound::smarthome {

enum class Variant { kV1, kV2, kV3 };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::kV1: return "v1";
    case Variant::kV2: return "v2";
    case Variant::kV3: return "v3";
  }
  return "v1";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "v1") return Variant::kV1;
  if (s == "v2") return Variant::kV2;
  if (s == "v3") return Variant::kV3;
  throw ContractError("unknown variant '" + s + "' (expected v1, v2 or v3)");
}

// Target indoor light for one inhabitant state.
struct HabitualBehavior {
  int inhabitant_state = 0;
  double low = 0.0;
  double high = 0.0;
  bool energy_preference = false;
};

struct EnvConfig {
  Variant variant = Variant::kV1;
  double beta = 100.0;  // lux per lamp level
  std::size_t lamp_levels = 5;
  std::vector<double> curtain_states{0.0, 0.5, 1.0};
  std::size_t n_us = 4;
  std::vector<std::string> inhabitant_names{"absent", "working", "movie", "sleeping"};
  double amplitude = 600.0;
  double mean_hour = 12.0;
  double stddev_hours = 3.0;
  double noise_max = 5.0;
  double step_minutes = 5.0;
  double energy_weight = 0.0;
  std::uint64_t seed = 1;
  std::vector<HabitualBehavior> behaviors;

  static EnvConfig defaults(Variant v, std::uint64_t seed = 1) {
    EnvConfig c;
    c.variant = v;
    c.seed = seed;
    const bool saving = v == Variant::kV3;
    c.energy_weight = saving ? 0.1 : 0.0;
    c.behaviors = {{0, 0.0, 0.0, saving},
                   {1, 250.0, 350.0, saving},
                   {2, 350.0, 450.0, saving},
                   {3, 0.0, 0.0, saving}};
    return c;
  }

  std::size_t steps_per_episode() const {
    return static_cast<std::size_t>(std::llround(24.0 * 60.0 / step_minutes));
  }
  double hour_of(std::size_t step) const {
    return static_cast<double>(step) * step_minutes / 60.0;
  }
  bool observes_outdoor_light() const { return variant != Variant::kV1; }
  double max_outdoor_light() const { return amplitude + noise_max; }

  void validate() const {
    if (!(beta > 0.0)) throw ContractError("beta must be > 0");
    if (lamp_levels < 2) throw ContractError("need at least two lamp levels");
    if (n_us < 2) throw ContractError("need at least two inhabitant states");
    if (curtain_states.empty()) throw ContractError("need at least one curtain state");
    if (!(step_minutes > 0.0)) throw ContractError("step length must be > 0");
    if (!(energy_weight >= 0.0)) throw ContractError("energy weight must be >= 0");
    if (behaviors.size() != n_us) throw ContractError("one habitual behaviour per inhabitant state");
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
      if (behaviors[i].inhabitant_state != static_cast<int>(i)) {
        throw ContractError("behaviours must be listed in inhabitant-state order");
      }
      if (behaviors[i].low > behaviors[i].high) throw ContractError("behaviour interval low > high");
    }
  }
};

inline nlohmann::json to_json(const EnvConfig& c) {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& h : c.behaviors) {
    b.push_back({{"inhabitantState", h.inhabitant_state},
                 {"targetLux", {h.low, h.high}},
                 {"energyPreference", h.energy_preference}});
  }
  return {{"variant", to_string(c.variant)}, {"beta", c.beta},
          {"lampLevels", c.lamp_levels},   {"curtainStates", c.curtain_states},
          {"nUs", c.n_us},                 {"inhabitantNames", c.inhabitant_names},
          {"amplitude", c.amplitude},      {"mean", c.mean_hour},
          {"stddev", c.stddev_hours},      {"noiseMax", c.noise_max},
          {"stepMinutes", c.step_minutes}, {"energyWeight", c.energy_weight},
          {"seed", c.seed},                {"behaviors", b}};
}

// Starts from the variant defaults and overrides whatever `j` provides.
inline EnvConfig env_config_from_json(const nlohmann::json& j, Variant fallback,
                                      std::uint64_t seed) {
  try {
    const Variant v = j.contains("variant")
                          ? variant_from_string(j.at("variant").get<std::string>())
                          : fallback;
    EnvConfig c = EnvConfig::defaults(v, j.value("seed", seed));
    c.beta = j.value("beta", c.beta);
    c.lamp_levels = j.value("lampLevels", c.lamp_levels);
    c.curtain_states = j.value("curtainStates", c.curtain_states);
    c.n_us = j.value("nUs", c.n_us);
    c.inhabitant_names = j.value("inhabitantNames", c.inhabitant_names);
    c.amplitude = j.value("amplitude", c.amplitude);
    c.mean_hour = j.value("mean", c.mean_hour);
    c.stddev_hours = j.value("stddev", c.stddev_hours);
    c.noise_max = j.value("noiseMax", c.noise_max);
    c.step_minutes = j.value("stepMinutes", c.step_minutes);
    c.energy_weight = j.value("energyWeight", c.energy_weight);
    if (j.contains("behaviors")) {
      c.behaviors.clear();
      for (const auto& b : j.at("behaviors")) {
        const auto lux = b.at("targetLux").get<std::vector<double>>();
        if (lux.size() != 2) throw ParseError("targetLux must be [low, high]");
        c.behaviors.push_back({b.at("inhabitantState").get<int>(), lux[0], lux[1],
                               b.value("energyPreference", false)});
      }
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("environment config: ") + e.what());
  }
}

// amplitude * exp(-(t - mean)^2 / (2 stddev^2)) + noiseMax * u, u in [0, 1).
inline double outdoor_light_at(const EnvConfig& c, double t_hours, double u) {
  if (!(t_hours >= 0.0 && t_hours < 24.0)) {
    throw ContractError("time of day must lie in [0, 24) hours");
  }
  const double d = t_hours - c.mean_hour;
  return c.amplitude * std::exp(-d * d / (2.0 * c.stddev_hours * c.stddev_hours)) +
         c.noise_max * u;
}

template <class Rng>
double outdoor_light(const EnvConfig& c, double t_hours, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return outdoor_light_at(c, t_hours, u(rng));
}

template <class Rng>
int inhabitant_state(Rng& rng, std::size_t n_us) {
  if (n_us == 0) throw ContractError("no inhabitant states");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n_us) - 1);
  return pick(rng);
}

inline double indoor_light(std::size_t lamp_level, double curtain, double outdoor,
                           double beta) {
  return beta * static_cast<double>(lamp_level) + outdoor * curtain;
}

inline const HabitualBehavior& behavior_for(const std::vector<HabitualBehavior>& behaviors,
                                            int us) {
  if (us < 0 || static_cast<std::size_t>(us) >= behaviors.size()) {
    throw ContractError("inhabitant state out of range");
  }
  return behaviors[static_cast<std::size_t>(us)];
}

inline bool satisfied(const std::vector<HabitualBehavior>& behaviors, int us,
                      double indoor) {
  const auto& b = behavior_for(behaviors, us);
  return b.low <= indoor && indoor <= b.high;
}

// +1 when the indoor light meets the behaviour for `us`, -1 otherwise. A
// satisfied behaviour with an energy preference pays energyWeight per lamp
// level, so daylight solutions earn more than lamp solutions.
inline double reward(int us, double indoor, std::size_t lamp_level,
                     const std::vector<HabitualBehavior>& behaviors,
                     double energy_weight) {
  if (!satisfied(behaviors, us, indoor)) return -1.0;
  const auto& b = behavior_for(behaviors, us);
  return 1.0 - (b.energy_preference ? energy_weight * static_cast<double>(lamp_level) : 0.0);
}

struct EnvState {
  int us = 0;
  double le = 0.0;
  std::size_t lp = 0;
  double cur = 0.0;
  double lr = 0.0;
  std::size_t t = 0;
};

class LightEnv {
 public:
  LightEnv(EnvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
  }

  const EnvConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }

  // Draws the uncontrollable states for step `t` of a day.
  void observe_step(std::size_t t) {
    state_.t = t;
    state_.us = inhabitant_state(rng_, cfg_.n_us);
    state_.le = outdoor_light(cfg_, cfg_.hour_of(t % cfg_.steps_per_episode()), rng_);
    state_.lr = indoor_light(state_.lp, state_.cur, state_.le, cfg_.beta);
  }

  std::vector<double> observation() const {
    if (cfg_.observes_outdoor_light()) return {static_cast<double>(state_.us), state_.le};
    return {static_cast<double>(state_.us)};
  }

  // Applies actuator states {lamp level, curtain index}; returns the reward.
  double apply(std::span<const std::size_t> actions) {
    if (actions.size() != 2 || actions[0] >= cfg_.lamp_levels ||
        actions[1] >= cfg_.curtain_states.size()) {
      throw ContractError("invalid actuator states");
    }
    state_.lp = actions[0];
    state_.cur = cfg_.curtain_states[actions[1]];
    state_.lr = indoor_light(state_.lp, state_.cur, state_.le, cfg_.beta);
    return reward(state_.us, state_.lr, state_.lp, cfg_.behaviors, cfg_.energy_weight);
  }

 private:
  EnvConfig cfg_;
  std::mt19937_64 rng_;
  EnvState state_;
};

inline Schema light_schema(const EnvConfig& c) {
  Schema s;
  s.columns.push_back({"s_us", StateKind::kDiscrete, Role::kInput, c.inhabitant_names});
  if (c.observes_outdoor_light()) {
    s.columns.push_back({"s_le", StateKind::kContinuous, Role::kInput, {}});
  } else {
    s.columns.push_back({"s_le", StateKind::kContinuous, Role::kAuxiliary, {}});
  }
  s.columns.push_back({"s_lp", StateKind::kDiscrete, Role::kTarget, {}});
  s.columns.push_back({"s_cur", StateKind::kDiscrete, Role::kTarget, {}});
  return s;
}

// Feature encoder for the agent: one-hot inhabitant state and, when
// observed, outdoor light scaled by its physical maximum.
inline FeatureEncoder light_encoder(const EnvConfig& c) {
  std::vector<FeatureEncoder::Field> f;
  f.push_back({StateKind::kDiscrete, 0.0, static_cast<double>(c.n_us - 1), c.n_us});
  if (c.observes_outdoor_light()) {
    f.push_back({StateKind::kContinuous, 0.0, c.max_outdoor_light(), 0});
  }
  return FeatureEncoder(std::move(f));
}

inline DqnAgent make_light_agent(const EnvConfig& c, const DqnConfig& d) {
  return DqnAgent(light_encoder(c), {c.lamp_levels, c.curtain_states.size()}, d);
}

struct TransitionLogRow {
  std::size_t t = 0;
  int us = 0;
  double le = 0.0;
  std::size_t lp = 0;
  double cur = 0.0;
  double r = 0.0;
  double lr = 0.0;
};

namespace detail {

inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_transition_csv(std::ostream& out, const std::vector<TransitionLogRow>& rows) {
  out << "t,s_us,s_le,s_lp,s_cur,r,s_lr\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.us << ',' << detail::shortest(r.le) << ',' << r.lp << ','
        << detail::shortest(r.cur) << ',' << detail::shortest(r.r) << ','
        << detail::shortest(r.lr) << '\n';
  }
}

struct TrainingConfig {
  std::size_t max_episodes = 400;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  // Epsilon stays at epsilon_start for the first `hold_fraction` of the
  // step budget, then decays linearly over the next `decay_fraction`.
  double hold_fraction = 0.0;
  double decay_fraction = 0.5;
  // Convergence: `window` consecutive greedy evaluation days, each meeting
  // the behaviours on at least `threshold` of its steps. Checked once
  // exploration has reached its floor.
  std::size_t window = 5;
  double threshold = 0.98;
  bool keep_log = true;
  DqnConfig dqn;
};

struct TrainingOutcome {
  DqnAgent agent;
  bool converged = false;
  std::size_t episodes = 0;
  std::vector<double> evaluation;  // greedy satisfaction rate per checked day
  std::vector<TransitionLogRow> log;
};

// Fraction of one simulated day on which the greedy policy meets the
// behaviours.
template <class Rng>
double greedy_satisfaction(const DqnAgent& agent, const EnvConfig& c, Rng& rng) {
  LightEnv env(c, rng());
  const std::size_t steps = c.steps_per_episode();
  std::size_t ok = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    env.observe_step(t);
    const auto a = agent.greedy(env.observation());
    env.apply(a);
    if (satisfied(c.behaviors, env.state().us, env.state().lr)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(steps);
}

inline TrainingOutcome run_training(const EnvConfig& c, const TrainingConfig& tc) {
  c.validate();
  TrainingOutcome out{make_light_agent(c, tc.dqn), false, 0, {}, {}};
  LightEnv env(c, c.seed);
  std::mt19937_64 explore(tc.dqn.seed * 0x9E3779B97F4A7C15ULL + 1);
  std::mt19937_64 replay_rng(tc.dqn.seed * 0x9E3779B97F4A7C15ULL + 2);
  std::mt19937_64 eval_rng(c.seed * 0x9E3779B97F4A7C15ULL + 3);
  ReplayBuffer buffer(tc.dqn.buffer_capacity);

  const std::size_t steps = c.steps_per_episode();
  const double budget = static_cast<double>(tc.max_episodes * steps);
  const double hold_steps = tc.hold_fraction * budget;
  const double decay_steps = std::max(1.0, tc.decay_fraction * budget);
  std::size_t global = 0;
  std::size_t streak = 0;
  if (tc.keep_log) out.log.reserve(tc.max_episodes * steps);

  for (std::size_t ep = 0; ep < tc.max_episodes; ++ep) {
    for (std::size_t t = 0; t < steps; ++t, ++global) {
      const double frac = std::clamp(
          (static_cast<double>(global) - hold_steps) / decay_steps, 0.0, 1.0);
      const double eps = tc.epsilon_start + (tc.epsilon_end - tc.epsilon_start) * frac;
      env.observe_step(t);
      std::vector<double> s = env.observation();
      const auto a = dqn_act(out.agent, s, eps, explore);
      const double r = env.apply(a);
      const EnvState& st = env.state();
      if (tc.keep_log) out.log.push_back({global, st.us, st.le, st.lp, st.cur, r, st.lr});
      // The actuators do not change the observed states.
      std::vector<double> next = s;
      buffer.push({std::move(s), a, r, std::move(next)});
      if (buffer.size() >= tc.dqn.batch_size) {
        const auto batch = buffer.sample(tc.dqn.batch_size, replay_rng);
        dqn_train_step(out.agent, batch);
      }
    }
    out.episodes = ep + 1;
    if (static_cast<double>(global) < hold_steps + decay_steps) continue;
    const double score = greedy_satisfaction(out.agent, c, eval_rng);
    out.evaluation.push_back(score);
    streak = score >= tc.threshold ? streak + 1 : 0;
    if (streak >= tc.window) {
      out.converged = true;
      break;
    }
  }
  return out;
}

// `days` simulated days of states labelled with the agent's greedy
// actuator states. Outdoor light is always kept (as an auxiliary column for
// agents that do not observe it) so rule conclusions can be judged.
inline Dataset simulate_dataset(const EnvConfig& c, const OracleModel& agent,
                                std::size_t days, std::uint64_t seed, Provenance tag) {
  Dataset ds{light_schema(c), {}, tag};
  LightEnv env(c, seed);
  const std::size_t steps = c.steps_per_episode();
  ds.samples.reserve(days * steps);
  for (std::size_t d = 0; d < days; ++d) {
    for (std::size_t t = 0; t < steps; ++t) {
      env.observe_step(t);
      Sample s;
      s.states = env.observation();
      s.targets = agent.predict(s.states);
      if (!c.observes_outdoor_light()) s.aux = {env.state().le};
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

inline double outdoor_of(const EnvConfig& c, const Sample& s) {
  return c.observes_outdoor_light() ? s.states.at(1) : s.aux.at(0);
}

// Accuracy judge: do the derived actuator states light the room the way
// the inhabitant wants?
inline JudgeFn light_judge(const EnvConfig& c) {
  return [c](const Sample& s, const std::vector<double>& y) {
    if (y.size() != 2) return false;
    const auto lp = static_cast<std::size_t>(y[0]);
    const auto ci = static_cast<std::size_t>(y[1]);
    if (ci >= c.curtain_states.size()) return false;
    const double lr = indoor_light(lp, c.curtain_states[ci], outdoor_of(c, s), c.beta);
    return satisfied(c.behaviors, static_cast<int>(s.states.at(0)), lr);
  };
}

struct CycleResult {
  Extraction extraction;
  std::pair<MetricsReport, MetricsReport> metrics;      // refined rules
  std::pair<MetricsReport, MetricsReport> pre_metrics;  // before refinement
  // Greedy agent judged the same way as the rules.
  std::pair<double, double> agent_accuracy;
};

inline CycleResult run_extraction_cycle(const DqnAgent& agent, const Dataset& seen,
                                        const Dataset& unseen, const EnvConfig& c,
                                        const ExtractionConfig& cfg) {
  CycleResult out;
  out.extraction = extract(agent, seen, unseen, cfg);
  const JudgeFn judge = light_judge(c);
  out.metrics = evaluate(out.extraction.rules, agent, seen, unseen, cfg, judge);
  out.pre_metrics = evaluate(out.extraction.combined, agent, seen, unseen, cfg, judge);
  auto agent_acc = [&](const Dataset& d) {
    std::size_t ok = 0;
    for (const auto& s : d.samples) ok += judge(s, agent.predict(s.states)) ? 1 : 0;
    return d.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(d.size());
  };
  out.agent_accuracy = {agent_acc(seen), agent_acc(unseen)};
  return out;
}

inline std::string curtain_phrase(std::size_t index, std::size_t n) {
  if (index == 0) return "the curtain is closed";
  if (index + 1 == n) return "the curtain is fully open";
  if (n == 3) return "the curtain is half-open";
  return "the curtain is at position " + std::to_string(index);
}

inline std::string lamp_phrase(std::size_t level) {
  if (level == 0) return "the lamp is off";
  return "the lamp is at level " + std::to_string(level);
}

inline std::string activity_phrase(const EnvConfig& c, int us) {
  static const char* kPhrases[] = {"absent", "working", "seeing a movie", "sleeping"};
  if (c.n_us == 4 && us >= 0 && us < 4 &&
      c.inhabitant_names == std::vector<std::string>{"absent", "working", "movie", "sleeping"}) {
    return kPhrases[us];
  }
  return us >= 0 && static_cast<std::size_t>(us) < c.inhabitant_names.size()
             ? c.inhabitant_names[static_cast<std::size_t>(us)]
             : "in state " + std::to_string(us);
}

// "if the inhabitant is working, and the outdoor light intensity is between
// 246 and 357 lux, then the lamp is off, and the curtain is fully open".
// Ranges are rounded to integers; averages and counts are not shown.
inline std::string render_light_rule(const Rule& r, const RuleSchema& schema,
                                     const EnvConfig& c) {
  std::ostringstream os;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    if (!r.conditions[i]) continue;
    const auto& sv = *r.conditions[i];
    if (schema.conditions[i].name == "s_us") {
      parts.push_back("the inhabitant is " +
                      activity_phrase(c, static_cast<int>(std::lround(sv.mean))));
    } else if (schema.conditions[i].name == "s_le") {
      parts.push_back("the outdoor light intensity is between " +
                      std::to_string(std::lround(sv.min)) + " and " +
                      std::to_string(std::lround(sv.max)) + " lux");
    } else {
      parts.push_back(schema.conditions[i].name + " is between " +
                      std::to_string(std::lround(sv.min)) + " and " +
                      std::to_string(std::lround(sv.max)));
    }
  }
  os << "if ";
  if (parts.empty()) os << "always";
  for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? ", and " : "") << parts[k];
  os << ", then " << lamp_phrase(static_cast<std::size_t>(r.conclusions.at(0).value)) << ", and "
     << curtain_phrase(static_cast<std::size_t>(r.conclusions.at(1).value),
                       c.curtain_states.size());
  return os.str();
}

}  // namespace rulehound::smarthome

#endif  // RULEHOUND_SMARTHOME_HPP_
