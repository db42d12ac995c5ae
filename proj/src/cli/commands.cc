// Copyright 2026 The Fedring Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fedring/adversary.h"
#include "fedring/cli.h"
#include "fedring/errors.h"

namespace fedring::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

json VectorJson(const ParamVector& v) { return v.ToStdVector(); }

ParamVector VectorFromJson(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string("trace field '") + what + "' must be an array");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(std::string("trace field '") + what + "' must hold numbers");
    v.push_back(e.get<double>());
  }
  return ParamVector(v);
}

json MetricsJson(const engine::TestMetrics& m) {
  return {{"loss", m.loss ? json(*m.loss) : json(nullptr)},
          {"accuracy", m.accuracy ? json(*m.accuracy) : json(nullptr)}};
}

// Flags shared by train and compare that override configuration fields.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> algorithm;
  std::optional<int> users;
  std::optional<int> global_epochs;
  std::optional<int> local_epochs;
  std::optional<int> adapt_epochs;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> batch_size;
  std::optional<std::string> cipher;
  std::optional<double> mask_sigma;
  std::optional<int> paillier_bits;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<double> shift;
  std::optional<int> samples_per_user;
  std::optional<int> feature_dim;
  std::optional<int> classes;
  std::optional<std::string> task;
  std::optional<std::string> model;
  std::optional<int> hidden;
  std::optional<std::string> hvp;
  std::optional<int> fold;
  std::optional<std::string> data;
  std::optional<int> workers;
  bool adapt_baselines = false;

  void Register(CLI::App& app, bool with_algorithm) {
    app.add_option("--config", config_path, "JSON configuration file");
    if (with_algorithm) {
      app.add_option("--algorithm", algorithm, "pppml, fedavg, local-only or centralized");
    }
    app.add_option("--users", users, "Number of users N");
    app.add_option("--global-epochs", global_epochs, "Global epochs K");
    app.add_option("--local-epochs", local_epochs, "Local iterations per round");
    app.add_option("--adapt-epochs", adapt_epochs, "Adaptation steps after training");
    app.add_option("--alpha", alpha, "Inner step size");
    app.add_option("--beta", beta, "Local learning rate");
    app.add_option("--batch-size", batch_size, "Mini-batch size");
    app.add_option("--cipher", cipher, "null or paillier");
    app.add_option("--mask-sigma", mask_sigma, "Ring mask standard deviation");
    app.add_option("--paillier-bits", paillier_bits, "Paillier modulus size");
    app.add_option("--seed", seed, "Experiment seed (fallback: FEDRING_SEED)");
    app.add_option("--profile", profile, "iid or heterogeneous");
    app.add_option("--shift", shift, "Heterogeneity shift magnitude");
    app.add_option("--samples-per-user", samples_per_user, "Samples generated per user");
    app.add_option("--feature-dim", feature_dim, "Synthetic input dimension");
    app.add_option("--classes", classes, "Number of classes");
    app.add_option("--task", task, "classification or regression");
    app.add_option("--model", model, "linear-regression, logistic-regression or mlp");
    app.add_option("--hidden", hidden, "MLP hidden width");
    app.add_option("--hvp", hvp, "finite-difference or exact");
    app.add_option("--fold", fold, "Held-out fifth used for testing");
    app.add_option("--data", data, "CSV shards instead of synthetic data");
    app.add_option("--workers", workers, "Worker threads");
    app.add_flag("--adapt-baselines", adapt_baselines, "Adapt baseline models too");
  }

  // defaults < config file < flags; FEDRING_SEED fills a seed given nowhere.
  json Resolve() const {
    json j = ToJson(RunConfig{});
    bool seed_given = false;
    if (config_path) {
      const json file = ReadJsonFile(*config_path);
      if (!file.is_object()) throw ConfigError(*config_path + ": expected a JSON object");
      seed_given = file.contains("seed");
      MergeInto(j, file);
    }
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    auto set_data = [&](const char* key, const auto& v) {
      if (v) j["data"][key] = *v;
    };
    set("algorithm", algorithm);
    set("users", users);
    set("global_epochs", global_epochs);
    set("local_epochs", local_epochs);
    set("adapt_epochs", adapt_epochs);
    set("alpha", alpha);
    set("beta", beta);
    set("batch_size", batch_size);
    set("cipher", cipher);
    set("mask_sigma", mask_sigma);
    set("paillier_bits", paillier_bits);
    set("hvp", hvp);
    set("workers", workers);
    if (adapt_baselines) j["adapt_baselines"] = true;
    if (seed) {
      j["seed"] = *seed;
      seed_given = true;
    }
    if (!seed_given) {
      if (const char* env = std::getenv("FEDRING_SEED")) {
        std::uint64_t v = 0;
        const std::string s(env);
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
          throw ConfigError("FEDRING_SEED must be a non-negative integer, got '" + s + "'");
        }
        j["seed"] = v;
      }
    }
    set_data("profile", profile);
    set_data("shift", shift);
    set_data("feature_dim", feature_dim);
    set_data("classes", classes);
    set_data("task", task);
    set_data("fold", fold);
    set_data("csv", data);
    if (samples_per_user) j["data"]["samples_per_user"] = *samples_per_user;
    if (model) j["model"]["kind"] = *model;
    if (hidden) j["model"]["hidden"] = *hidden;
    if (task && !model) {
      j["model"]["kind"] = *task == "regression" ? "linear-regression" : "logistic-regression";
    }
    return j;
  }
};

std::string TransportName(const engine::ExperimentConfig& e) {
  if (e.algorithm == engine::Algorithm::kPppml && e.cipher == engine::CipherKind::kPaillier) {
    return "csahe";
  }
  if (e.algorithm == engine::Algorithm::kPppml || e.algorithm == engine::Algorithm::kFedAvg) {
    return "plaintext";
  }
  return "none";
}

std::string MetricsCsv(const std::string& run_id, const engine::TrainingHistory& h) {
  std::string csv = "run_id,epoch,user,local_train_loss,server_train_loss,server_param_l2\n";
  for (const auto& e : h.epochs) {
    const std::string l2 = e.server_model.dim() > 0 ? FormatDouble(e.server_model.Norm2()) : "";
    for (std::size_t i = 0; i < e.local_train_loss.size(); ++i) {
      csv += run_id + "," + std::to_string(e.epoch) + "," + std::to_string(i) + "," +
             FormatDouble(e.local_train_loss[i]) + "," +
             FormatDouble(e.server_train_loss[i]) + "," + l2 + "\n";
    }
  }
  return csv;
}

json HistoryJson(const std::string& run_id, const RunConfig& config,
                 const engine::TrainingHistory& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"server_model", e.server_model.dim() > 0 ? VectorJson(e.server_model) : json(nullptr)},
                      {"local_train_loss", e.local_train_loss},
                      {"server_train_loss", e.server_train_loss}});
  }
  json users = json::array();
  for (std::size_t i = 0; i < h.users.size(); ++i) {
    const auto& u = h.users[i];
    users.push_back({{"user", i},
                     {"adapted", u.adapted_model.has_value()},
                     {"server_test", MetricsJson(u.server_test)},
                     {"final_test", MetricsJson(u.final_test)},
                     {"deployed_model", VectorJson(u.deployed_model)}});
  }
  return {{"manifest", "manifest.json"},
          {"run_id", run_id},
          {"config", ToJson(config)},
          {"epochs", epochs},
          {"users", users}};
}

json TraceJson(const std::string& run_id, const RunConfig& config, int feature_dim,
               const engine::TrainingHistory& h) {
  json rounds = json::array();
  for (const auto& r : h.trace) {
    json uploads = json::array();
    for (const auto& u : r.uploads) uploads.push_back({{"user", u.user}, {"delta", VectorJson(u.delta)}});
    rounds.push_back({{"epoch", r.epoch},
                      {"server_weights", VectorJson(r.server_weights)},
                      {"uploads", uploads},
                      {"ring", r.ring ? csahe::ToJson(*r.ring) : json(nullptr)},
                      {"aggregate", r.aggregate ? VectorJson(*r.aggregate) : json(nullptr)}});
  }
  const auto& e = config.experiment;
  return {{"manifest", "manifest.json"},
          {"run_id", run_id},
          {"transport", TransportName(e)},
          {"config", ToJson(config)},
          {"feature_dim", feature_dim},
          {"beta", e.beta},
          {"local_epochs", e.local_epochs},
          {"codec", {{"scale_bits", e.codec.scale_bits},
                     {"plaintext_modulus_bits", e.codec.plaintext_modulus_bits}}},
          {"public_key", h.keys ? csahe::ToJson(h.keys->public_key) : json(nullptr)},
          {"leaked_private_key", h.keys ? csahe::ToJson(h.keys->private_key) : json(nullptr)},
          {"rounds", rounds}};
}

int ReportError(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const NonFiniteError*>(&e)) return kExitDiverged;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SchemaError*>(&e)) {
    return kExitConfigError;
  }
  return kExitFailure;
}

// ---------------------------------------------------------------- attack

struct AttackArgs {
  std::string run;
  std::string vantage;
  int round = -1;
  std::size_t hop = 0;
  int iterations = 5000;
  double eta = 0.1;
  int snapshot_every = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

json LoadTrace(const fs::path& run) {
  const fs::path path = fs::is_directory(run) ? run / "trace.json" : run;
  if (!fs::exists(path)) throw ConfigError("trace not found: " + path.string());
  json t = ReadJsonFile(path);
  for (const char* key : {"transport", "config", "rounds", "beta", "local_epochs", "feature_dim", "codec"}) {
    if (!t.is_object() || !t.contains(key)) {
      throw ConfigError(path.string() + ": invalid trace, missing '" + key + "'");
    }
  }
  if (!t["rounds"].is_array() || t["rounds"].empty()) {
    throw ConfigError(path.string() + ": trace holds no rounds");
  }
  return t;
}

int RunAttack(const AttackArgs& args) {
  const json trace = LoadTrace(args.run);
  const RunConfig config = ConfigFromJson(trace["config"]);
  const auto users = BuildUsers(config);
  const model::ModelSpec spec = BuildModelSpec(config, trace["feature_dim"].get<int>());
  const std::string transport = trace["transport"].get<std::string>();

  const json& rounds = trace["rounds"];
  const int round_index = args.round < 0 ? static_cast<int>(rounds.size()) - 1 : args.round;
  if (round_index >= static_cast<int>(rounds.size())) {
    throw ConfigError("round " + std::to_string(round_index) + " not in trace (" +
                      std::to_string(rounds.size()) + " rounds)");
  }
  const json& round = rounds[static_cast<std::size_t>(round_index)];

  adversary::AttackContext ctx;
  ctx.model_spec = spec;
  ctx.server_weights = VectorFromJson(round["server_weights"], "server_weights");
  ctx.update_scale = -trace["beta"].get<double>() * trace["local_epochs"].get<double>();

  auto add_candidates = [&](std::size_t user) {
    const auto& x = users.at(user).train.inputs;
    for (Eigen::Index r = 0; r < x.rows(); ++r) ctx.candidates.emplace_back(x.row(r).transpose());
  };
  auto require = [&](const std::string& want) {
    if (transport != want) {
      throw ConfigError("vantage '" + args.vantage + "' needs a " + want +
                        " trace, this run used " + transport);
    }
  };

  FixedPointCodec codec;
  codec.scale_bits = trace["codec"]["scale_bits"].get<int>();
  codec.plaintext_modulus_bits = trace["codec"]["plaintext_modulus_bits"].get<int>();

  adversary::Observation observation;
  if (args.vantage == "type1-fedavg") {
    require("plaintext");
    std::vector<engine::Upload> uploads;
    for (const auto& u : round["uploads"]) {
      uploads.push_back({u.at("user").get<int>(), VectorFromJson(u.at("delta"), "delta")});
    }
    if (args.hop >= uploads.size()) {
      throw ConfigError("hop " + std::to_string(args.hop) + " out of range");
    }
    add_candidates(static_cast<std::size_t>(uploads[args.hop].user));
    observation = adversary::Intercept(uploads, args.hop, ctx);
  } else if (args.vantage == "type1-csahe" || args.vantage == "type2-leakedkey") {
    require("csahe");
    const csahe::RingState ring = csahe::RingStateFromJson(round.at("ring"));
    if (args.hop >= ring.trace.size()) {
      throw ConfigError("hop " + std::to_string(args.hop) + " out of range");
    }
    if (args.vantage == "type1-csahe") {
      observation = adversary::Intercept(ring, args.hop);
    } else {
      for (std::size_t u = 0; u < users.size(); ++u) add_candidates(u);
      const auto sk = csahe::PrivateKeyFromJson(trace.at("leaked_private_key"));
      observation = adversary::HbcView(ring, args.hop, sk, codec, ctx);
    }
  } else if (args.vantage == "aggregate") {
    if (transport == "none") throw ConfigError("vantage 'aggregate' needs a federated trace");
    for (std::size_t u = 0; u < users.size(); ++u) add_candidates(u);
    observation = adversary::AggregateView(VectorFromJson(round.at("aggregate"), "aggregate"), ctx);
  } else {
    throw ConfigError("unknown vantage '" + args.vantage + "'");
  }

  json out;
  if (!adversary::PlaintextAvailable(observation)) {
    const auto& c = std::get<adversary::CiphertextObservation>(observation);
    out = {{"plaintext_available", false},
           {"hop", c.hop},
           {"sender", c.sender},
           {"receiver", c.receiver},
           {"scheme", csahe::ToString(c.scheme)},
           {"dim", c.dim},
           {"ciphertext_bytes", c.bytes.size()}};
  }
  adversary::AttackResult result;
  if (adversary::PlaintextAvailable(observation)) {
    adversary::AttackOptions opts;
    opts.iterations = args.iterations;
    opts.eta = args.eta;
    opts.snapshot_every = args.snapshot_every;
    SeededRng rng(args.seed, "attack");
    result = adversary::IdlgAttack(observation, opts, rng);
    out = adversary::ToJson(result);
    out["plaintext_available"] = true;
    out["provenance"] = adversary::ToString(std::get<adversary::AttackTarget>(observation).provenance);
  }
  out["vantage"] = args.vantage;
  out["round"] = round_index;
  out["hop"] = args.hop;
  out["run_id"] = trace.value("run_id", "");

  const fs::path out_dir = args.out ? fs::path(*args.out)
                                    : (fs::is_directory(args.run) ? fs::path(args.run) : fs::path(args.run).parent_path());
  AtomicWrite(out_dir / "attack.json", out.dump(2) + "\n");
  if (!result.snapshots.empty()) {
    if (!adversary::IsPerfectSquare(static_cast<std::size_t>(result.dummy_data.size()))) {
      std::cerr << "warning: input dimension is not a perfect square, snapshots skipped\n";
    } else {
      fs::create_directories(out_dir / "snapshots");
      for (const auto& s : result.snapshots) {
        std::ostringstream name;
        name << "iter_" << std::setw(6) << std::setfill('0') << s.iteration << ".pgm";
        adversary::WritePgm(out_dir / "snapshots" / name.str(), s.data);
      }
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------- compare

struct CompareArgs {
  Overrides overrides;
  std::optional<std::string> matrix;
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;
  std::string out = "compare-out";
};

struct CompareRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<engine::TestMetrics> users;
};

std::string OptionalCell(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }

int RunCompare(const CompareArgs& args) {
  json base = args.overrides.Resolve();
  std::vector<std::string> algorithms = args.algorithms;
  std::vector<std::uint64_t> seeds = args.seeds;
  if (args.matrix) {
    const json m = ReadJsonFile(*args.matrix);
    if (!m.is_object()) throw ConfigError(*args.matrix + ": expected a JSON object");
    for (auto it = m.begin(); it != m.end(); ++it) {
      if (it.key() != "algorithms" && it.key() != "seeds" && it.key() != "config") {
        throw ConfigError("matrix field '" + it.key() + "': unknown field");
      }
    }
    if (m.contains("config")) MergeInto(base, m["config"]);
    try {
      if (m.contains("algorithms")) algorithms = m["algorithms"].get<std::vector<std::string>>();
      if (m.contains("seeds")) seeds = m["seeds"].get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      throw ConfigError("matrix fields 'algorithms' and 'seeds' must be a string list and an integer list");
    }
  }
  if (algorithms.empty() || seeds.empty()) {
    throw ConfigError("comparison matrix is empty: give at least one algorithm and one seed");
  }

  std::vector<RunConfig> runs;
  std::vector<CompareRow> rows;
  for (const auto& a : algorithms) {
    for (auto s : seeds) {
      json j = base;
      j["algorithm"] = a;
      j["seed"] = s;
      j["workers"] = 1;
      runs.push_back(ConfigFromJson(j));
      rows.push_back({a, s, {}});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        const auto users = BuildUsers(runs[i]);
        const auto spec = BuildModelSpec(runs[i], static_cast<int>(users.front().train.feature_dim()));
        const auto h = engine::RunTraining(runs[i].experiment, spec, users);
        for (const auto& u : h.users) rows[i].users.push_back(u.final_test);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    const int jobs = std::clamp(args.jobs, 1, static_cast<int>(runs.size()));
    std::vector<std::jthread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  std::string summary = "algorithm,user,seed,test_loss,test_accuracy\n";
  // (algorithm, user) -> sums over seeds
  struct Acc {
    double loss = 0, acc = 0;
    int n_loss = 0, n_acc = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, Acc>> means;
  auto add = [](Acc& a, const engine::TestMetrics& m) {
    if (m.loss) a.loss += *m.loss, ++a.n_loss;
    if (m.accuracy) a.acc += *m.accuracy, ++a.n_acc;
  };
  for (const auto& r : rows) {
    if (!means.count(r.algorithm)) order.push_back(r.algorithm);
    auto& per_user = means[r.algorithm];
    for (std::size_t u = 0; u < r.users.size(); ++u) {
      const auto& m = r.users[u];
      summary += r.algorithm + "," + std::to_string(u) + "," + std::to_string(r.seed) + "," +
                 OptionalCell(m.loss) + "," + OptionalCell(m.accuracy) + "\n";
      add(per_user[std::to_string(u)], m);
      add(per_user["all"], m);
    }
  }
  std::string mean_csv = "algorithm,user,mean_test_loss,mean_test_accuracy\n";
  for (const auto& a : order) {
    for (const auto& [user, acc] : means[a]) {
      if (user == "all") continue;
      mean_csv += a + "," + user + "," +
                  (acc.n_loss ? FormatDouble(acc.loss / acc.n_loss) : "") + "," +
                  (acc.n_acc ? FormatDouble(acc.acc / acc.n_acc) : "") + "\n";
    }
    const Acc& all = means[a]["all"];
    mean_csv += a + ",all," + (all.n_loss ? FormatDouble(all.loss / all.n_loss) : "") + "," +
                (all.n_acc ? FormatDouble(all.acc / all.n_acc) : "") + "\n";
  }
  const fs::path out(args.out);
  AtomicWrite(out / "summary.csv", summary);
  AtomicWrite(out / "summary_mean.csv", mean_csv);
  std::cout << mean_csv;
  return kExitOk;
}

}  // namespace

int RunTrain(const RunConfig& config, const fs::path& out,
             const std::vector<std::string>& argv) {
  const std::string run_id = RunId(config);
  json manifest = {{"run_id", run_id},
                   {"version", FEDRING_VERSION},
                   {"config", ToJson(config)},
                   {"argv", argv},
                   {"start_time", Timestamp()},
                   {"end_time", nullptr},
                   {"outputs", {{"history", "history.json"},
                                {"metrics", "metrics.csv"},
                                {"trace", config.experiment.record_trace ? json("trace.json") : json(nullptr)}}}};
  AtomicWrite(out / "manifest.json", manifest.dump(2) + "\n");

  const auto users = BuildUsers(config);
  const int feature_dim = static_cast<int>(users.front().train.feature_dim());
  const auto spec = BuildModelSpec(config, feature_dim);
  const auto history = engine::RunTraining(config.experiment, spec, users);

  AtomicWrite(out / "history.json", HistoryJson(run_id, config, history).dump(2) + "\n");
  AtomicWrite(out / "metrics.csv", MetricsCsv(run_id, history));
  if (config.experiment.record_trace) {
    AtomicWrite(out / "trace.json", TraceJson(run_id, config, feature_dim, history).dump() + "\n");
  }
  json timings = json::array();
  for (const auto& e : history.epochs) timings.push_back(e.wall_seconds);
  manifest["end_time"] = Timestamp();
  manifest["epoch_wall_seconds"] = timings;
  AtomicWrite(out / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

int Main(int argc, const char* const* argv) {
  CLI::App app{"Personalized federated learning with cyclic secure aggregation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FEDRING_VERSION));

  Overrides train;
  std::string train_out = "run-out";
  bool no_trace = false;
  auto* train_cmd = app.add_subcommand("train", "Run one training experiment");
  train.Register(*train_cmd, true);
  train_cmd->add_option("--out", train_out, "Output directory");
  train_cmd->add_flag("--no-trace", no_trace, "Skip trace.json");

  AttackArgs attack;
  auto* attack_cmd = app.add_subcommand("attack", "Run iDLG against a recorded trace");
  attack_cmd->add_option("--run", attack.run, "Run directory or trace.json")->required();
  attack_cmd->add_option("--vantage", attack.vantage, "type1-fedavg, type1-csahe, type2-leakedkey or aggregate")
      ->required();
  attack_cmd->add_option("--round", attack.round, "Global epoch to attack (default: last)");
  attack_cmd->add_option("--hop", attack.hop, "Upload index or ring hop");
  attack_cmd->add_option("--iterations", attack.iterations, "Attack iterations");
  attack_cmd->add_option("--eta", attack.eta, "Attack step size");
  attack_cmd->add_option("--snapshot-every", attack.snapshot_every, "Write a PGM snapshot every n iterations");
  attack_cmd->add_option("--seed", attack.seed, "Dummy initialisation seed");
  attack_cmd->add_option("--out", attack.out, "Output directory (default: the run directory)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Run an algorithm by seed matrix");
  compare.overrides.Register(*compare_cmd, false);
  compare_cmd->add_option("--matrix", compare.matrix, "JSON matrix {algorithms, seeds, config}");
  compare_cmd->add_option("--algorithms", compare.algorithms, "Algorithms to compare")->delimiter(',');
  compare_cmd->add_option("--seeds", compare.seeds, "Seeds")->delimiter(',');
  compare_cmd->add_option("--jobs", compare.jobs, "Concurrent runs");
  compare_cmd->add_option("--out", compare.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*train_cmd) {
      json j = train.Resolve();
      if (no_trace) j["record_trace"] = false;
      const RunConfig config = ConfigFromJson(j);
      std::vector<std::string> args(argv, argv + argc);
      return RunTrain(config, train_out, args);
    }
    if (*attack_cmd) return RunAttack(attack);
    if (*compare_cmd) return RunCompare(compare);
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    return ReportError(e);
  }
  return kExitFailure;
}

}  // namespace fedring::cli
