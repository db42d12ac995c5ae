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

#ifndef FEDRING_DATASET_H_
#define FEDRING_DATASET_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fedring {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One user's samples. `targets` holds regression values or, for
// classifiers, class indices stored as doubles.
struct DatasetShard {
  RowMatrix inputs;
  Eigen::VectorXd targets;
  std::string user_id;

  DatasetShard() = default;
  DatasetShard(RowMatrix in, Eigen::VectorXd t, std::string user);

  std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
  std::size_t feature_dim() const {
    return static_cast<std::size_t>(inputs.cols());
  }
  bool empty() const { return size() == 0; }

  // Throws DimensionError if rows and targets disagree.
  void Validate() const;

  DatasetShard Subset(std::span<const std::size_t> rows) const;
};

// Row-wise concatenation; all shards must share a feature dimension.
DatasetShard Concatenate(std::span<const DatasetShard> shards,
                         std::string user_id);

// A user's private data after the train/test split.
struct UserData {
  DatasetShard train;
  DatasetShard test;
};

}  // namespace fedring

#endif  // FEDRING_DATASET_H_
