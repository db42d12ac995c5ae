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

#ifndef FEDRING_METRICS_H_
#define FEDRING_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedring::metrics {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

// Flat boolean mask with a declared shape.
struct BinaryMask {
  std::vector<std::uint8_t> values;
  std::vector<std::size_t> shape;

  BinaryMask() = default;
  BinaryMask(std::vector<std::uint8_t> v, std::vector<std::size_t> s);
  // 1-D mask shaped like the value list.
  explicit BinaryMask(std::vector<std::uint8_t> v);

  std::size_t count() const;
};

// (TP + TN) / (TP + TN + FP + FN). Throws EmptyError on a zero total.
double Accuracy(const ConfusionCounts& c);

// 2|Y n Y'| / (|Y| + |Y'|). Two empty masks are an EmptyError rather than
// 1; mismatched shapes are a ShapeError.
double Dice(const BinaryMask& y, const BinaryMask& y_pred);

// |Y n Y'| / |Y|. Throws EmptyError for an empty ground truth.
double Recall(const BinaryMask& y, const BinaryMask& y_pred);

}  // namespace fedring::metrics

#endif  // FEDRING_METRICS_H_
