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

// Subcommands of the rulehound command-line tool. Kept in a header so the
// tests can drive them in-process through run().

#ifndef RULEHOUND_TOOLS_COMMANDS_HPP_
#define RULEHOUND_TOOLS_COMMANDS_HPP_

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "rulehound.hpp"

namespace rulehound::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kTrainingFailure = 4 };

class UsageError : public Error {
 public:
  using Error::Error;
};

#ifndef RULEHOUND_DEFAULT_DATA_DIR
#define RULEHOUND_DEFAULT_DATA_DIR "data"
#endif

// ---------------------------------------------------------------- hashing

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 unavailable");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return os.str();
}

// --------------------------------------------------------------- settings

struct DatasetSpec {
  std::string name;
  std::string csv;
  std::string schema;
};

// Everything a run can be configured with. Filled from defaults, then the
// --config file, then explicit flags.
struct Settings {
  std::uint64_t seed = 1;
  double split_ratio = 0.8;
  TrainConfig mlp;
  std::vector<std::size_t> hidden{16, 16};
  ExtractionConfig extraction;
  std::string method = "pbre";
  std::vector<DatasetSpec> datasets;
  std::vector<std::uint64_t> seeds;
  nlohmann::json env = nlohmann::json::object();
  smarthome::TrainingConfig training;
  std::size_t seen_days = 3;
  std::size_t unseen_days = 1;
};

inline void apply_config(Settings& s, const nlohmann::json& j) {
  try {
    s.seed = j.value("seed", s.seed);
    s.split_ratio = j.value("splitRatio", s.split_ratio);
    s.method = j.value("method", s.method);
    if (j.contains("mlp")) {
      const auto& m = j.at("mlp");
      s.mlp.epochs = m.value("epochs", s.mlp.epochs);
      s.mlp.batch_size = m.value("batchSize", s.mlp.batch_size);
      s.mlp.learning_rate = m.value("learningRate", s.mlp.learning_rate);
      s.mlp.target_loss = m.value("targetLoss", s.mlp.target_loss);
      s.hidden = m.value("hidden", s.hidden);
    }
    if (j.contains("extraction")) {
      const auto& e = j.at("extraction");
      s.extraction.tolerance_fraction = e.value("tolerance", s.extraction.tolerance_fraction);
      s.extraction.epsilon_corr = e.value("epsilon", s.extraction.epsilon_corr);
      s.extraction.merge_tolerance = e.value("mergeTolerance", s.extraction.merge_tolerance);
    }
    for (const auto& d : j.value("datasets", nlohmann::json::array())) {
      if (d.is_string()) {
        s.datasets.push_back({d.get<std::string>(), "", ""});
      } else {
        s.datasets.push_back({d.at("name").get<std::string>(), d.value("csv", ""),
                              d.value("schema", "")});
      }
    }
    s.seeds = j.value("seeds", s.seeds);
    if (j.contains("env")) s.env = j.at("env");
    if (j.contains("training")) {
      const auto& t = j.at("training");
      auto& tc = s.training;
      tc.max_episodes = t.value("maxEpisodes", tc.max_episodes);
      tc.epsilon_start = t.value("epsilonStart", tc.epsilon_start);
      tc.epsilon_end = t.value("epsilonEnd", tc.epsilon_end);
      tc.hold_fraction = t.value("holdFraction", tc.hold_fraction);
      tc.decay_fraction = t.value("decayFraction", tc.decay_fraction);
      tc.window = t.value("window", tc.window);
      tc.threshold = t.value("threshold", tc.threshold);
      if (t.contains("dqn")) {
        const auto& d = t.at("dqn");
        auto& dc = tc.dqn;
        dc.hidden = d.value("hidden", dc.hidden);
        dc.gamma = d.value("gamma", dc.gamma);
        dc.learning_rate = d.value("learningRate", dc.learning_rate);
        dc.batch_size = d.value("batchSize", dc.batch_size);
        dc.sync_every = d.value("syncEvery", dc.sync_every);
        dc.buffer_capacity = d.value("bufferCapacity", dc.buffer_capacity);
      }
      s.seen_days = t.value("seenDays", s.seen_days);
      s.unseen_days = t.value("unseenDays", s.unseen_days);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

inline nlohmann::json snapshot(const Settings& s) {
  nlohmann::json ds = nlohmann::json::array();
  for (const auto& d : s.datasets) ds.push_back({{"name", d.name}, {"csv", d.csv}, {"schema", d.schema}});
  const auto& tc = s.training;
  return {{"seed", s.seed},
          {"splitRatio", s.split_ratio},
          {"method", s.method},
          {"mlp",
           {{"epochs", s.mlp.epochs},
            {"batchSize", s.mlp.batch_size},
            {"learningRate", s.mlp.learning_rate},
            {"targetLoss", s.mlp.target_loss},
            {"hidden", s.hidden}}},
          {"extraction",
           {{"tolerance", s.extraction.tolerance_fraction},
            {"epsilon", s.extraction.epsilon_corr},
            {"mergeTolerance", s.extraction.merge_tolerance}}},
          {"datasets", ds},
          {"seeds", s.seeds},
          {"env", s.env},
          {"training",
           {{"maxEpisodes", tc.max_episodes},
            {"epsilonStart", tc.epsilon_start},
            {"epsilonEnd", tc.epsilon_end},
            {"holdFraction", tc.hold_fraction},
            {"decayFraction", tc.decay_fraction},
            {"window", tc.window},
            {"threshold", tc.threshold},
            {"seenDays", s.seen_days},
            {"unseenDays", s.unseen_days},
            {"dqn",
             {{"hidden", tc.dqn.hidden},
              {"gamma", tc.dqn.gamma},
              {"learningRate", tc.dqn.learning_rate},
              {"batchSize", tc.dqn.batch_size},
              {"syncEvery", tc.dqn.sync_every},
              {"bufferCapacity", tc.dqn.buffer_capacity}}}}}};
}

// --------------------------------------------------------------- manifest

class Run {
 public:
  Run(std::string command, std::vector<std::string> argv, fs::path out)
      : command_(std::move(command)), argv_(std::move(argv)), out_(std::move(out)),
        start_(std::chrono::steady_clock::now()), started_(std::time(nullptr)) {
    fs::create_directories(out_);
  }

  const fs::path& out() const { return out_; }
  fs::path path(const std::string& name) const { return out_ / name; }

  void input(const std::string& p) {
    if (p.empty()) return;
    if (!fs::is_regular_file(p)) throw UsageError("input file '" + p + "' does not exist");
    inputs_.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = path(name);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    outputs_.push_back(p.string());
    return f;
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    open(name) << j.dump(2) << '\n';
  }

  void finish(const Settings& s, const nlohmann::json& extra = nlohmann::json::object()) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started_));
    nlohmann::json m{{"command", command_},
                     {"argv", argv_},
                     {"config", snapshot(s)},
                     {"seed", s.seed},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"startedAt", stamp},
                     {"wallClockSeconds", secs},
                     {"version", "0.1.0"}};
    if (!extra.empty()) m["result"] = extra;
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (!f) throw Error("cannot write manifest");
    f << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  fs::path out_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
  std::time_t started_;
};

// ---------------------------------------------------------------- helpers

inline Dataset load_dataset(const std::string& csv, const std::string& schema) {
  if (!fs::exists(schema)) throw UsageError("schema file '" + schema + "' does not exist");
  if (!fs::exists(csv)) throw UsageError("data file '" + csv + "' does not exist");
  return load_csv(csv, load_schema(schema));
}

inline DatasetSpec resolve_dataset(const DatasetSpec& d, const std::string& data_dir) {
  DatasetSpec r = d;
  if (r.csv.empty()) r.csv = (fs::path(data_dir) / (d.name + ".csv")).string();
  if (r.schema.empty()) r.schema = (fs::path(data_dir) / (d.name + ".schema.json")).string();
  return r;
}

inline ExtractionConfig extraction_for(const Settings& s) {
  ExtractionConfig e = s.extraction;
  e.seed = s.seed;
  return e;
}

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void check_method(const std::string& m, bool allow_both) {
  if (m == "pbre" || m == "rxncm" || (allow_both && m == "both")) return;
  throw UsageError("unknown method '" + m + "' (expected pbre" +
                   std::string(allow_both ? ", rxncm or both)" : " or rxncm)"));
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string data, schema, env, variant = "v1";
  std::optional<std::size_t> episodes, epochs;
};

inline int cmd_train(const TrainArgs& a, Settings& s, Run& run, std::ostream& out) {
  if (!a.env.empty()) {
    if (a.env != "smarthome") throw UsageError("unknown environment '" + a.env + "'");
    auto cfg = smarthome::env_config_from_json(
        s.env, smarthome::variant_from_string(a.variant), s.seed);
    if (a.episodes) s.training.max_episodes = *a.episodes;
    s.training.dqn.seed = s.seed;
    const auto t = smarthome::run_training(cfg, s.training);
    run.write_json("checkpoint.json", checkpoint_json(t.agent));
    {
      auto f = run.open("transitions.csv");
      smarthome::write_transition_csv(f, t.log);
    }
    const nlohmann::json result{{"converged", t.converged},
                                {"episodes", t.episodes},
                                {"evaluation", t.evaluation},
                                {"env", smarthome::to_json(cfg)}};
    run.finish(s, result);
    out << "trained " << a.variant << " agent: " << t.episodes << " episodes, "
        << (t.converged ? "converged" : "did not converge") << "\n";
    return t.converged ? kOk : kTrainingFailure;
  }
  if (a.data.empty() || a.schema.empty()) {
    throw UsageError("train needs --data and --schema, or --env smarthome");
  }
  run.input(a.data);
  run.input(a.schema);
  const Dataset full = load_dataset(a.data, a.schema);
  const auto [seen, unseen] = split_seen_unseen(full, s.split_ratio, s.seed);
  if (a.epochs) s.mlp.epochs = *a.epochs;
  s.mlp.seed = s.seed;
  const auto fit = train_classifier(seen, s.mlp, s.hidden);
  run.write_json("checkpoint.json", checkpoint_json(fit.model));
  run.finish(s, {{"trainAccuracy", fit.report.train_accuracy},
                 {"epochs", fit.report.epochs_run},
                 {"seen", seen.size()},
                 {"unseen", unseen.size()}});
  out << "trained classifier on " << seen.size() << " samples, train accuracy "
      << fixed(fit.report.train_accuracy, 4) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string checkpoint, data, schema;
};

inline int cmd_extract(const ExtractArgs& a, Settings& s, Run& run, std::ostream& out) {
  check_method(s.method, false);
  run.input(a.checkpoint);
  run.input(a.data);
  run.input(a.schema);
  const nlohmann::json ck = read_json(a.checkpoint);
  if (checkpoint_kind(ck) != "classifier") {
    throw UsageError("extract takes classifier checkpoints; use simulate --no-train for agents");
  }
  const MlpClassifier model = classifier_from_checkpoint(ck);
  const Dataset full = load_dataset(a.data, a.schema);
  const auto [seen, unseen] = split_seen_unseen(full, s.split_ratio, s.seed);
  const ExtractionConfig ecfg = extraction_for(s);
  std::pair<MetricsReport, MetricsReport> m;
  std::vector<std::string> text;
  nlohmann::json result;
  if (s.method == "pbre") {
    const auto ex = extract(model, seen, unseen, ecfg);
    m = evaluate(ex.rules, model, seen, unseen, ecfg);
    for (const auto& r : ex.rules.rules) text.push_back(render_rule(r, ex.rules.schema));
    run.write_json("rules.json", to_json(ex.rules));
    result = {{"risInitialAccuracy", ex.ris.initial_accuracy},
              {"risFinalAccuracy", ex.ris.final_accuracy}};
  } else {
    const auto ex = rxncm_extract(model, seen, unseen);
    m = evaluate(ex.rules, model, seen, unseen);
    for (const auto& r : ex.rules.rules) text.push_back(render_rule(r, ex.rules.schema));
    run.write_json("rules.json", to_json(ex.rules));
  }
  {
    auto f = run.open("rules.txt");
    for (const auto& t : text) f << t << '\n';
  }
  const std::string name = fs::path(a.data).stem().string();
  {
    auto f = run.open("metrics.csv");
    f << metrics_csv_header() << '\n'
      << metrics_csv_row(name, s.method, "seen", m.first) << '\n'
      << metrics_csv_row(name, s.method, "unseen", m.second) << '\n';
  }
  result["seen"] = to_json(m.first);
  result["unseen"] = to_json(m.second);
  run.finish(s, result);
  out << text.size() << " rules (" << s.method << ")\n";
  for (const auto& t : text) out << "  " << t << '\n';
  return kOk;
}

// ---------------------------------------------------------------- compare

struct CellResult {
  double train_accuracy = 0.0;
  std::pair<MetricsReport, MetricsReport> pbre, rxncm;
  double ris_initial = 0.0, ris_final = 0.0;
};

inline CellResult compare_cell(const Dataset& full, std::uint64_t seed, const Settings& s) {
  const auto [seen, unseen] = split_seen_unseen(full, s.split_ratio, seed);
  TrainConfig tc = s.mlp;
  tc.seed = seed;
  const auto fit = train_classifier(seen, tc, s.hidden);
  CellResult c;
  c.train_accuracy = fit.report.train_accuracy;
  ExtractionConfig ecfg = s.extraction;
  ecfg.seed = seed;
  if (s.method != "rxncm") {
    const auto ex = extract(fit.model, seen, unseen, ecfg);
    c.pbre = evaluate(ex.rules, fit.model, seen, unseen, ecfg);
    c.ris_initial = ex.ris.initial_accuracy;
    c.ris_final = ex.ris.final_accuracy;
  }
  if (s.method != "pbre") {
    const auto ex = rxncm_extract(fit.model, seen, unseen);
    c.rxncm = evaluate(ex.rules, fit.model, seen, unseen);
  }
  return c;
}

struct MeanReport {
  double num_rules = 0, accuracy = 0, similarity = 0, inference = 0, average = 0;

  void add(const MetricsReport& m, double w) {
    num_rules += w * static_cast<double>(m.num_rules);
    accuracy += w * m.accuracy;
    similarity += w * m.similarity;
    inference += w * m.inference;
    average += w * m.average;
  }
  void add(const MeanReport& m, double w) {
    num_rules += w * m.num_rules;
    accuracy += w * m.accuracy;
    similarity += w * m.similarity;
    inference += w * m.inference;
    average += w * m.average;
  }
};

inline std::string mean_row(const std::string& dataset, const std::string& method,
                            const std::string& split, const MeanReport& m) {
  return dataset + "," + method + "," + split + "," + fixed(m.num_rules, 2) + "," +
         format_fraction(m.accuracy) + "," + format_fraction(m.similarity) + "," +
         format_fraction(m.inference) + "," + format_fraction(m.average);
}

struct CompareArgs {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> files;  // {name, csv, schema}
  std::string data_dir = RULEHOUND_DEFAULT_DATA_DIR;
  std::size_t jobs = 0;
};

inline int cmd_compare(const CompareArgs& a, Settings& s, Run& run, std::ostream& out) {
  for (const auto& n : a.names) s.datasets.push_back({n, "", ""});
  for (const auto& f : a.files) s.datasets.push_back({f.at(0), f.at(1), f.at(2)});
  if (s.datasets.empty()) {
    for (const char* n : {"iris", "wbc", "wine"}) s.datasets.push_back({n, "", ""});
  }
  if (s.seeds.empty()) s.seeds = {s.seed};

  std::map<std::string, Dataset> data;
  for (auto& d : s.datasets) {
    d = resolve_dataset(d, a.data_dir);
    if (data.count(d.name)) throw UsageError("dataset '" + d.name + "' listed twice");
    run.input(d.csv);
    run.input(d.schema);
    data.emplace(d.name, load_dataset(d.csv, d.schema));
  }

  // Cells are independent and seeded on their own, so they may run in any
  // order; results are keyed and written in sorted order.
  using Key = std::pair<std::string, std::uint64_t>;
  std::vector<Key> keys;
  for (const auto& [name, _] : data) {
    for (auto seed : s.seeds) keys.emplace_back(name, seed);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const std::size_t jobs =
      std::max<std::size_t>(1, a.jobs ? a.jobs : std::thread::hardware_concurrency());
  std::map<Key, CellResult> cells;
  for (std::size_t i = 0; i < keys.size(); i += jobs) {
    std::vector<std::future<CellResult>> pending;
    for (std::size_t k = i; k < std::min(keys.size(), i + jobs); ++k) {
      pending.push_back(std::async(std::launch::async, [&, k] {
        return compare_cell(data.at(keys[k].first), keys[k].second, s);
      }));
    }
    for (std::size_t k = i; k < std::min(keys.size(), i + jobs); ++k) {
      cells.emplace(keys[k], pending[k - i].get());
    }
  }

  std::vector<std::string> methods;
  if (s.method != "rxncm") methods.push_back("pbre");
  if (s.method != "pbre") methods.push_back("rxncm");

  auto by_seed = run.open("metrics_by_seed.csv");
  by_seed << "seed," << metrics_csv_header() << '\n';
  auto mean = run.open("metrics.csv");
  mean << metrics_csv_header() << '\n';
  std::map<std::pair<std::string, std::string>, MeanReport> method_avg;
  nlohmann::json summary = nlohmann::json::object();
  std::size_t ris_runs = 0, ris_violations = 0;
  const std::size_t seeds = s.seeds.size();

  for (const auto& [name, _] : data) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& method : methods) {
      for (const std::string split : {"seen", "unseen"}) {
        MeanReport m;
        for (auto seed : s.seeds) {
          const CellResult& c = cells.at({name, seed});
          const auto& pair = method == "pbre" ? c.pbre : c.rxncm;
          const auto& r = split == "seen" ? pair.first : pair.second;
          by_seed << seed << ',' << metrics_csv_row(name, method, split, r) << '\n';
          m.add(r, 1.0 / static_cast<double>(seeds));
        }
        mean << mean_row(name, method, split, m) << '\n';
        method_avg[{method, split}].add(m, 1.0 / static_cast<double>(data.size()));
      }
    }
    for (auto seed : s.seeds) {
      const CellResult& c = cells.at({name, seed});
      nlohmann::json row{{"seed", seed}, {"trainAccuracy", c.train_accuracy}};
      if (s.method != "rxncm") {
        const bool ok = c.ris_final >= c.ris_initial;
        ++ris_runs;
        ris_violations += ok ? 0 : 1;
        row["pbreRules"] = c.pbre.first.num_rules;
        row["risInitialAccuracy"] = c.ris_initial;
        row["risFinalAccuracy"] = c.ris_final;
        row["risMonotone"] = ok;
      }
      if (s.method != "pbre") row["rxncmRules"] = c.rxncm.first.num_rules;
      per.push_back(std::move(row));
    }
    summary[name] = std::move(per);
  }
  by_seed.close();
  mean.close();
  {
    auto f = run.open("averages.csv");
    f << metrics_csv_header() << '\n';
    for (const auto& method : methods) {
      const std::string label = method == "pbre" ? "PBRE Ave." : "RxNCM Ave.";
      for (const std::string split : {"seen", "unseen"}) {
        f << mean_row(label, method, split, method_avg[{method, split}]) << '\n';
      }
    }
  }
  const nlohmann::json result{{"runs", summary},
                              {"risRuns", ris_runs},
                              {"risViolations", ris_violations}};
  run.write_json("summary.json", result);
  run.finish(s, {{"risRuns", ris_runs}, {"risViolations", ris_violations}});

  out << "compared " << data.size() << " datasets x " << seeds << " seeds x "
      << methods.size() << " methods\n";
  std::ifstream back(run.path("metrics.csv"));
  out << back.rdbuf();
  if (ris_runs) {
    out << "RIS monotonicity: " << (ris_violations ? "VIOLATED" : "ok") << " on "
        << ris_runs - ris_violations << "/" << ris_runs << " runs\n";
  }
  return kOk;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string variant = "v1";
  std::string checkpoint;
  bool no_train = false;
  std::optional<std::size_t> episodes;
};

inline std::vector<smarthome::TransitionLogRow> rollout_rows(const smarthome::EnvConfig& c,
                                                             const Dataset& d) {
  std::vector<smarthome::TransitionLogRow> rows;
  rows.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Sample& s = d.samples[i];
    const int us = static_cast<int>(s.states[0]);
    const double le = smarthome::outdoor_of(c, s);
    const auto lp = static_cast<std::size_t>(s.targets[0]);
    const double cur = c.curtain_states.at(static_cast<std::size_t>(s.targets[1]));
    const double lr = smarthome::indoor_light(lp, cur, le, c.beta);
    rows.push_back({i, us, le, lp, cur,
                    smarthome::reward(us, lr, lp, c.behaviors, c.energy_weight), lr});
  }
  return rows;
}

inline int cmd_simulate(const SimulateArgs& a, Settings& s, Run& run, std::ostream& out) {
  using namespace smarthome;
  const EnvConfig cfg = env_config_from_json(s.env, variant_from_string(a.variant), s.seed);
  if (a.episodes) s.training.max_episodes = *a.episodes;
  s.training.dqn.seed = s.seed;
  DqnAgent agent;
  bool converged = true;
  nlohmann::json result;
  if (a.no_train) {
    if (a.checkpoint.empty()) throw UsageError("--no-train needs --checkpoint");
    run.input(a.checkpoint);
    agent = agent_from_checkpoint(read_json(a.checkpoint));
    if (agent.encoder().width() != light_encoder(cfg).width()) {
      throw UsageError("checkpoint does not fit the " + a.variant + " observation");
    }
  } else {
    TrainingOutcome t = run_training(cfg, s.training);
    converged = t.converged;
    result["converged"] = t.converged;
    result["episodes"] = t.episodes;
    result["evaluation"] = t.evaluation;
    {
      auto f = run.open("transitions.csv");
      write_transition_csv(f, t.log);
    }
    agent = std::move(t.agent);
    run.write_json("checkpoint.json", checkpoint_json(agent));
  }
  const Dataset seen = simulate_dataset(cfg, agent, s.seen_days, s.seed * 1000 + 11,
                                        Provenance::kSeen);
  const Dataset unseen = simulate_dataset(cfg, agent, s.unseen_days, s.seed * 1000 + 12,
                                          Provenance::kUnseen);
  if (a.no_train) {
    auto f = run.open("transitions.csv");
    write_transition_csv(f, rollout_rows(cfg, seen));
  }
  const CycleResult cy = run_extraction_cycle(agent, seen, unseen, cfg, extraction_for(s));
  const RuleSet& rules = cy.extraction.rules;
  run.write_json("rules.json", to_json(rules));
  std::vector<std::string> text;
  for (const auto& r : rules.rules) text.push_back(render_light_rule(r, rules.schema, cfg));
  {
    auto f = run.open("rules.txt");
    for (const auto& t : text) f << t << '\n';
  }
  const std::string name = "smarthome-" + a.variant;
  {
    auto f = run.open("metrics.csv");
    f << metrics_csv_header() << '\n'
      << metrics_csv_row(name, "pbre", "seen", cy.metrics.first) << '\n'
      << metrics_csv_row(name, "pbre", "unseen", cy.metrics.second) << '\n';
  }
  result["env"] = to_json(cfg);
  result["seen"] = to_json(cy.metrics.first);
  result["unseen"] = to_json(cy.metrics.second);
  result["agentAccuracy"] = {cy.agent_accuracy.first, cy.agent_accuracy.second};
  run.finish(s, result);

  if (!a.no_train) {
    out << "training: " << result["episodes"].get<std::size_t>() << " episodes, "
        << (converged ? "converged" : "did not converge") << "\n";
  }
  out << text.size() << " rules for " << name << "\n";
  for (const auto& t : text) out << "  " << t << '\n';
  out << "unseen accuracy " << fixed(cy.metrics.second.accuracy, 4) << ", similarity "
      << fixed(cy.metrics.second.similarity, 4) << "\n";
  return converged ? kOk : kTrainingFailure;
}

// -------------------------------------------------------------------- run

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"rulehound: extract interval rules from trained models", "rulehound"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "rulehound 0.1.0");

  Settings s;
  std::string config, out_dir = "rulehound-out";
  std::optional<std::uint64_t> seed;
  std::optional<double> split_ratio, tolerance, epsilon;
  std::optional<std::string> method;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed for splits, initialisation and simulation");
    sub->add_option("--config", config, "JSON file with run settings; flags override it")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (falls back to $RULEHOUND_OUT)")
        ->envname("RULEHOUND_OUT")
        ->capture_default_str();
  };
  auto split_flag = [&](CLI::App* sub) {
    sub->add_option("--split-ratio", split_ratio, "Fraction of samples in the seen split")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto extraction_flags = [&](CLI::App* sub) {
    sub->add_option("--tolerance", tolerance,
                    "Merge tolerance as a fraction of each state's seen range")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--epsilon", epsilon, "Correlation threshold for premise matching")
        ->check(CLI::PositiveNumber);
  };

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train an MLP on a CSV dataset or a DQN agent");
  common(train);
  split_flag(train);
  train->add_option("--data", ta.data, "CSV dataset");
  train->add_option("--schema", ta.schema, "Schema JSON for --data");
  train->add_option("--env", ta.env, "Environment to train an agent in (smarthome)");
  train->add_option("--variant", ta.variant, "Smart-home variant: v1, v2 or v3")
      ->check(CLI::IsMember({"v1", "v2", "v3"}))
      ->capture_default_str();
  train->add_option("--epochs", ta.epochs, "MLP training epochs");
  train->add_option("--episodes", ta.episodes, "Maximum DQN training episodes");

  ExtractArgs ea;
  auto* ext = app.add_subcommand("extract", "Extract rules from a trained classifier");
  common(ext);
  split_flag(ext);
  extraction_flags(ext);
  ext->add_option("--checkpoint", ea.checkpoint, "Classifier checkpoint from train")->required();
  ext->add_option("--data", ea.data, "CSV dataset")->required();
  ext->add_option("--schema", ea.schema, "Schema JSON for --data")->required();
  ext->add_option("--method", method, "pbre or rxncm");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Benchmark PBRE against RxNCM over datasets and seeds");
  common(cmp);
  split_flag(cmp);
  extraction_flags(cmp);
  std::vector<std::uint64_t> seeds;
  cmp->add_option("--datasets", ca.names, "Bundled dataset names (default iris,wbc,wine)")
      ->delimiter(',');
  cmp->add_option("--dataset-file", ca.files, "Extra dataset as NAME CSV SCHEMA")
      ->expected(3)
      ->allow_extra_args(false);
  cmp->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
  cmp->add_option("--data-dir", ca.data_dir, "Directory holding <name>.csv and <name>.schema.json")
      ->capture_default_str();
  cmp->add_option("--method", method, "pbre, rxncm or both (default both)");
  cmp->add_option("--jobs", ca.jobs, "Parallel cells (0 = one per core)");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Train a smart-home agent and extract its rules");
  common(sim);
  extraction_flags(sim);
  sim->add_option("--variant", sa.variant, "v1, v2 or v3")
      ->check(CLI::IsMember({"v1", "v2", "v3"}))
      ->capture_default_str();
  sim->add_option("--episodes", sa.episodes, "Maximum training episodes");
  sim->add_flag("--no-train", sa.no_train, "Skip training and load --checkpoint");
  sim->add_option("--checkpoint", sa.checkpoint, "Agent checkpoint for --no-train");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::vector<std::string> args(argv, argv + argc);
  CLI::App* sub = app.get_subcommands().front();
  try {
    if (sub == cmp) s.method = "both";
    if (!config.empty()) apply_config(s, read_json(config));
    if (seed) s.seed = *seed;
    if (split_ratio) s.split_ratio = *split_ratio;
    if (tolerance) s.extraction.tolerance_fraction = *tolerance;
    if (epsilon) s.extraction.epsilon_corr = *epsilon;
    if (method) s.method = *method;
    if (!seeds.empty()) s.seeds = seeds;
    if (sub == cmp) check_method(s.method, true);
    if (sub == ext) check_method(s.method, false);

    Run r(sub->get_name(), args, out_dir);
    r.input(config);
    if (sub == train) return cmd_train(ta, s, r, out);
    if (sub == ext) return cmd_extract(ea, s, r, out);
    if (sub == cmp) return cmd_compare(ca, s, r, out);
    return cmd_simulate(sa, s, r, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return kTrainingFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace rulehound::cli

#endif  // RULEHOUND_TOOLS_COMMANDS_HPP_
