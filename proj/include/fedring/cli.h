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

#ifndef FEDRING_CLI_H_
#define FEDRING_CLI_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedring/data_synth.h"
#include "fedring/engine.h"
#include "fedring/model.h"
#include "json.hpp"

namespace fedring::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDiverged = 3;

struct DataConfig {
  std::string profile = "heterogeneous";  // iid | heterogeneous
  double shift = 5.0;
  std::vector<int> samples_per_user;  // empty: 500 per user
  int feature_dim = 8;
  int classes = 2;
  data::Task task = data::Task::kClassification;
  double label_noise = 0.05;
  double separation = 3.0;
  int fold = 0;
  std::optional<std::string> csv;
};

struct ModelConfig {
  model::ModelKind kind = model::ModelKind::kLogisticRegression;
  int hidden = 16;
};

struct RunConfig {
  engine::ExperimentConfig experiment;
  DataConfig data;
  ModelConfig model;
};

// Full configuration as JSON, every field present.
nlohmann::json ToJson(const RunConfig& config);

// Parses and validates a configuration document. Unknown or mistyped
// fields raise ConfigError naming the field.
RunConfig ConfigFromJson(const nlohmann::json& j);

// Deep-merges `overrides` into `base` (objects recursively, other values
// replaced).
void MergeInto(nlohmann::json& base, const nlohmann::json& overrides);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);

model::ModelSpec BuildModelSpec(const RunConfig& config, int feature_dim);

// Synthetic users from the data profile, or the CSV shards split per user.
std::vector<UserData> BuildUsers(const RunConfig& config);

// Stable identifier of a configuration.
std::string RunId(const RunConfig& config);

// Writes via a temporary file and rename so readers never see partial
// output.
void AtomicWrite(const std::filesystem::path& path, std::string_view content);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

int RunTrain(const RunConfig& config, const std::filesystem::path& out,
             const std::vector<std::string>& argv);

// Entry point behind the `fedring` binary.
int Main(int argc, const char* const* argv);

}  // namespace fedring::cli

#endif  // FEDRING_CLI_H_
