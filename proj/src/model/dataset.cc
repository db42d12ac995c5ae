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

#include "fedring/dataset.h"

#include <string>
#include <utility>

#include "fedring/errors.h"

namespace fedring {

DatasetShard::DatasetShard(RowMatrix in, Eigen::VectorXd t, std::string user)
    : inputs(std::move(in)), targets(std::move(t)), user_id(std::move(user)) {
  Validate();
}

void DatasetShard::Validate() const {
  if (inputs.rows() != targets.size()) {
    throw DimensionError("shard '" + user_id + "' has " +
                         std::to_string(inputs.rows()) + " input rows but " +
                         std::to_string(targets.size()) + " targets");
  }
}

DatasetShard DatasetShard::Subset(std::span<const std::size_t> rows) const {
  RowMatrix in(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= size()) throw IndexError("subset row out of range");
    const auto r = static_cast<Eigen::Index>(rows[i]);
    in.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
    t[static_cast<Eigen::Index>(i)] = targets[r];
  }
  return DatasetShard(std::move(in), std::move(t), user_id);
}

DatasetShard Concatenate(std::span<const DatasetShard> shards,
                         std::string user_id) {
  if (shards.empty()) return DatasetShard(RowMatrix(0, 0), {}, user_id);
  Eigen::Index rows = 0;
  const Eigen::Index cols = shards.front().inputs.cols();
  for (const auto& s : shards) {
    if (s.inputs.cols() != cols) {
      throw DimensionError("cannot concatenate shards of different widths");
    }
    rows += s.inputs.rows();
  }
  RowMatrix in(rows, cols);
  Eigen::VectorXd t(rows);
  Eigen::Index at = 0;
  for (const auto& s : shards) {
    in.middleRows(at, s.inputs.rows()) = s.inputs;
    t.segment(at, s.targets.size()) = s.targets;
    at += s.inputs.rows();
  }
  return DatasetShard(std::move(in), std::move(t), std::move(user_id));
}

}  // namespace fedring
