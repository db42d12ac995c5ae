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

#ifndef FEDRING_DATA_SYNTH_H_
#define FEDRING_DATA_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "fedring/dataset.h"

namespace fedring::data {

enum class Task { kRegression, kClassification };

std::string_view ToString(Task task);
Task ParseTask(std::string_view s);

// Knobs for the synthetic heterogeneous benchmark.
//
// Regression users draw targets from w* + delta_i with |delta_i| equal to
// shift_magnitude. Classification users see the shared class means rotated
// by a user-specific rotation chosen so every class mean moves by
// shift_magnitude (capped at a half turn). Zero shift gives IID users.
struct HeterogeneityProfile {
  int n_users = 3;
  std::vector<int> samples_per_user;
  Task task = Task::kClassification;
  double shift_magnitude = 0.0;
  int feature_dim = 8;
  // Flip probability for classification, noise stddev for regression.
  double label_noise = 0.05;
  int num_classes = 2;
  // Norm of each shared class mean.
  double class_separation = 3.0;
  // Which fifth of each user's samples is held out for testing.
  int test_fold = 0;

  static HeterogeneityProfile Uniform(int n_users, int samples, Task task,
                                      double shift, int feature_dim);
  void Validate() const;
};

// Generates per-user train/test shards; deterministic given (profile, seed).
std::vector<UserData> MakeUsers(const HeterogeneityProfile& profile,
                                std::uint64_t seed);

// Reads the `user_id,target,f0,...` CSV format. Shards come back in order of
// first appearance of each user id.
std::vector<DatasetShard> LoadShards(const std::filesystem::path& path);

void WriteShards(const std::filesystem::path& path,
                 std::span<const DatasetShard> shards);

// Five-fold style split of one shard: the given fifth becomes the test set.
UserData SplitShard(const DatasetShard& shard, int test_fold);

}  // namespace fedring::data

#endif  // FEDRING_DATA_SYNTH_H_
