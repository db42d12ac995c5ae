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

#include "fedring/metrics.h"

#include <functional>
#include <numeric>
#include <utility>

#include "fedring/errors.h"

namespace fedring::metrics {
namespace {

std::size_t Intersection(const BinaryMask& a, const BinaryMask& b) {
  if (a.shape != b.shape || a.values.size() != b.values.size()) {
    throw ShapeError("mask shapes differ");
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    n += (a.values[i] != 0 && b.values[i] != 0) ? 1 : 0;
  }
  return n;
}

}  // namespace

BinaryMask::BinaryMask(std::vector<std::uint8_t> v, std::vector<std::size_t> s)
    : values(std::move(v)), shape(std::move(s)) {
  const std::size_t expected = std::accumulate(
      shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (expected != values.size()) {
    throw ShapeError("mask has " + std::to_string(values.size()) +
                     " values but its shape holds " + std::to_string(expected));
  }
}

BinaryMask::BinaryMask(std::vector<std::uint8_t> v)
    : values(std::move(v)), shape{values.size()} {}

std::size_t BinaryMask::count() const {
  std::size_t n = 0;
  for (auto v : values) n += v != 0 ? 1 : 0;
  return n;
}

double Accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyError("accuracy of zero samples");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double Dice(const BinaryMask& y, const BinaryMask& y_pred) {
  const std::size_t overlap = Intersection(y, y_pred);
  const std::size_t denom = y.count() + y_pred.count();
  if (denom == 0) throw EmptyError("dice of two empty masks is undefined");
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(denom);
}

double Recall(const BinaryMask& y, const BinaryMask& y_pred) {
  const std::size_t overlap = Intersection(y, y_pred);
  const std::size_t truth = y.count();
  if (truth == 0) throw EmptyError("recall with an empty ground truth");
  return static_cast<double>(overlap) / static_cast<double>(truth);
}

}  // namespace fedring::metrics
