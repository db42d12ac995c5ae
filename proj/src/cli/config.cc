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

#include <set>
#include <sstream>
#include <string>

#include "fedring/cli.h"
#include "fedring/errors.h"

namespace fedring::cli {
namespace {

using nlohmann::json;

// Reads typed fields from one JSON object and rejects unknown keys.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string prefix)
      : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(Where("") + "expected an object");
  }

  void Int(const char* key, int& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer()) throw ConfigError(Where(key) + "expected an integer");
      out = v->get<int>();
    }
  }

  void Uint64(const char* key, std::uint64_t& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0)) {
        throw ConfigError(Where(key) + "expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void Double(const char* key, double& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number()) throw ConfigError(Where(key) + "expected a number");
      out = v->get<double>();
    }
  }

  void OptionalDouble(const char* key, std::optional<double>& out) {
    if (const json* v = Find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw ConfigError(Where(key) + "expected a number or null");
      }
    }
  }

  void Bool(const char* key, bool& out) {
    if (const json* v = Find(key)) {
      if (!v->is_boolean()) throw ConfigError(Where(key) + "expected true or false");
      out = v->get<bool>();
    }
  }

  template <typename Parse>
  void Enum(const char* key, Parse parse) {
    if (const json* v = Find(key)) {
      if (!v->is_string()) throw ConfigError(Where(key) + "expected a string");
      try {
        parse(v->get<std::string>());
      } catch (const Error& e) {
        throw ConfigError(Where(key) + e.what());
      }
    }
  }

  void OptionalString(const char* key, std::optional<std::string>& out) {
    if (const json* v = Find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        throw ConfigError(Where(key) + "expected a string or null");
      }
    }
  }

  void IntList(const char* key, std::vector<int>& out) {
    if (const json* v = Find(key)) {
      if (v->is_number_integer()) {
        out.assign(1, v->get<int>());
        single_ = true;
        return;
      }
      if (!v->is_array()) throw ConfigError(Where(key) + "expected an integer or a list");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) throw ConfigError(Where(key) + "list entries must be integers");
        out.push_back(e.get<int>());
      }
    }
  }

  const json* Object(const char* key) { return Find(key); }

  void Finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(Where(it.key()) + "unknown field");
    }
  }

  std::string Where(const std::string& key) const {
    std::string path = prefix_.empty() ? key : (key.empty() ? prefix_ : prefix_ + "." + key);
    return "config field '" + path + "': ";
  }

  bool single() const { return single_; }

 private:
  const json* Find(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
  bool single_ = false;
};

}  // namespace

void MergeInto(json& base, const json& overrides) {
  if (!overrides.is_object() || !base.is_object()) {
    base = overrides;
    return;
  }
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      MergeInto(base[it.key()], *it);
    } else {
      base[it.key()] = *it;
    }
  }
}

json ToJson(const RunConfig& config) {
  const auto& e = config.experiment;
  const auto& d = config.data;
  json j;
  j["algorithm"] = engine::ToString(e.algorithm);
  j["users"] = e.users;
  j["global_epochs"] = e.global_epochs;
  j["local_epochs"] = e.local_epochs;
  j["adapt_epochs"] = e.adapt_epochs;
  j["alpha"] = e.alpha;
  j["beta"] = e.beta;
  j["batch_size"] = e.batch_size;
  j["cipher"] = engine::ToString(e.cipher);
  j["mask_sigma"] = e.mask_sigma ? json(*e.mask_sigma) : json(nullptr);
  j["paillier_bits"] = e.paillier_bits;
  j["scale_bits"] = e.codec.scale_bits;
  j["plaintext_modulus_bits"] = e.codec.plaintext_modulus_bits;
  j["hvp"] = model::ToString(e.hvp);
  j["adapt_baselines"] = e.adapt_baselines;
  j["record_trace"] = e.record_trace;
  j["workers"] = e.workers;
  j["seed"] = e.seed;
  j["model"] = {{"kind", model::ToString(config.model.kind)},
                {"hidden", config.model.hidden}};
  j["data"] = {{"profile", d.profile},
               {"shift", d.shift},
               {"samples_per_user", d.samples_per_user},
               {"feature_dim", d.feature_dim},
               {"classes", d.classes},
               {"task", data::ToString(d.task)},
               {"label_noise", d.label_noise},
               {"separation", d.separation},
               {"fold", d.fold},
               {"csv", d.csv ? json(*d.csv) : json(nullptr)}};
  return j;
}

RunConfig ConfigFromJson(const json& j) {
  RunConfig c;
  auto& e = c.experiment;
  FieldReader r(j, "");
  r.Enum("algorithm", [&](const std::string& s) { e.algorithm = engine::ParseAlgorithm(s); });
  r.Int("users", e.users);
  r.Int("global_epochs", e.global_epochs);
  r.Int("local_epochs", e.local_epochs);
  r.Int("adapt_epochs", e.adapt_epochs);
  r.Double("alpha", e.alpha);
  r.Double("beta", e.beta);
  r.Int("batch_size", e.batch_size);
  r.Enum("cipher", [&](const std::string& s) { e.cipher = engine::ParseCipherKind(s); });
  r.OptionalDouble("mask_sigma", e.mask_sigma);
  r.Int("paillier_bits", e.paillier_bits);
  r.Int("scale_bits", e.codec.scale_bits);
  r.Int("plaintext_modulus_bits", e.codec.plaintext_modulus_bits);
  r.Enum("hvp", [&](const std::string& s) { e.hvp = model::ParseHvpBackend(s); });
  r.Bool("adapt_baselines", e.adapt_baselines);
  r.Bool("record_trace", e.record_trace);
  r.Int("workers", e.workers);
  r.Uint64("seed", e.seed);

  if (const json* m = r.Object("model")) {
    FieldReader mr(*m, "model");
    mr.Enum("kind", [&](const std::string& s) { c.model.kind = model::ParseModelKind(s); });
    mr.Int("hidden", c.model.hidden);
    mr.Finish();
  }
  bool single_count = false;
  if (const json* dj = r.Object("data")) {
    FieldReader dr(*dj, "data");
    auto& d = c.data;
    dr.Enum("profile", [&](const std::string& s) {
      if (s != "iid" && s != "heterogeneous") {
        throw ArgumentError("expected iid or heterogeneous, got '" + s + "'");
      }
      d.profile = s;
    });
    dr.Double("shift", d.shift);
    dr.IntList("samples_per_user", d.samples_per_user);
    single_count = dr.single();
    dr.Int("feature_dim", d.feature_dim);
    dr.Int("classes", d.classes);
    dr.Enum("task", [&](const std::string& s) { d.task = data::ParseTask(s); });
    dr.Double("label_noise", d.label_noise);
    dr.Double("separation", d.separation);
    dr.Int("fold", d.fold);
    dr.OptionalString("csv", d.csv);
    dr.Finish();
  }
  r.Finish();

  auto& d = c.data;
  if (d.profile == "iid") d.shift = 0.0;
  if (single_count) d.samples_per_user.assign(static_cast<std::size_t>(std::max(e.users, 0)), d.samples_per_user.front());
  if (!d.samples_per_user.empty() &&
      static_cast<int>(d.samples_per_user.size()) != e.users) {
    throw ConfigError("config field 'data.samples_per_user': lists " +
                      std::to_string(d.samples_per_user.size()) +
                      " users but 'users' is " + std::to_string(e.users));
  }
  if (c.model.hidden < 1) throw ConfigError("config field 'model.hidden': must be >= 1");
  if (d.feature_dim < 1) throw ConfigError("config field 'data.feature_dim': must be >= 1");
  if (d.classes < 2) throw ConfigError("config field 'data.classes': must be >= 2");
  if (d.fold < 0 || d.fold > 4) throw ConfigError("config field 'data.fold': must be in [0, 4]");
  if (c.model.kind == model::ModelKind::kLinearRegression && d.task != data::Task::kRegression) {
    throw ConfigError("config field 'model.kind': linear-regression needs data.task regression");
  }
  if (c.model.kind == model::ModelKind::kLogisticRegression && d.task != data::Task::kClassification) {
    throw ConfigError("config field 'model.kind': logistic-regression needs data.task classification");
  }
  e.Validate();
  return c;
}

model::ModelSpec BuildModelSpec(const RunConfig& config, int feature_dim) {
  const bool classify = config.data.task == data::Task::kClassification;
  switch (config.model.kind) {
    case model::ModelKind::kLinearRegression:
      return model::ModelSpec::LinearRegression(feature_dim);
    case model::ModelKind::kLogisticRegression:
      return model::ModelSpec::LogisticRegression(feature_dim, config.data.classes);
    case model::ModelKind::kMlp:
      return model::ModelSpec::Mlp(
          feature_dim, config.model.hidden, classify ? config.data.classes : 1,
          classify ? model::LossKind::kCrossEntropy : model::LossKind::kSquaredError);
  }
  throw ConfigError("unknown model kind");
}

std::vector<UserData> BuildUsers(const RunConfig& config) {
  const auto& d = config.data;
  if (d.csv) {
    const auto shards = data::LoadShards(*d.csv);
    if (static_cast<int>(shards.size()) != config.experiment.users) {
      throw ConfigError("data file has " + std::to_string(shards.size()) +
                        " users but 'users' is " +
                        std::to_string(config.experiment.users));
    }
    std::vector<UserData> users;
    for (const auto& s : shards) users.push_back(data::SplitShard(s, d.fold));
    return users;
  }
  data::HeterogeneityProfile p;
  p.n_users = config.experiment.users;
  p.samples_per_user = d.samples_per_user.empty()
                           ? std::vector<int>(static_cast<std::size_t>(p.n_users), 500)
                           : d.samples_per_user;
  p.task = d.task;
  p.shift_magnitude = d.shift;
  p.feature_dim = d.feature_dim;
  p.label_noise = d.label_noise;
  p.num_classes = d.classes;
  p.class_separation = d.separation;
  p.test_fold = d.fold;
  try {
    return data::MakeUsers(p, config.experiment.seed);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("data profile: ") + e.what());
  }
}

std::string RunId(const RunConfig& config) {
  std::ostringstream s;
  s << std::hex << Fnv1a64(ToJson(config).dump());
  std::string id = s.str();
  return std::string(16 - std::min<std::size_t>(16, id.size()), '0') + id;
}

}  // namespace fedring::cli
