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

#include "fedring/param_vector.h"

#include <cmath>
#include <cstring>
#include <string>

#include "fedring/errors.h"

namespace fedring {

ParamVector::ParamVector(Eigen::VectorXd values) : values_(std::move(values)) {
  CheckFinite();
}

ParamVector::ParamVector(std::span<const double> values)
    : values_(Eigen::Map<const Eigen::VectorXd>(
          values.data(), static_cast<Eigen::Index>(values.size()))) {
  CheckFinite();
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(std::span<const double>(values.begin(), values.size())) {}

ParamVector ParamVector::Zeros(std::size_t dim) {
  return ParamVector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
}

std::vector<double> ParamVector::ToStdVector() const {
  return std::vector<double>(values_.data(), values_.data() + values_.size());
}

double ParamVector::NormInf() const {
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

double ParamVector::Norm2() const { return values_.norm(); }

double ParamVector::Dot(const ParamVector& other) const {
  CheckSameDim(other);
  return values_.dot(other.values_);
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  CheckSameDim(other);
  values_ += other.values_;
  CheckFinite();
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  CheckSameDim(other);
  values_ -= other.values_;
  CheckFinite();
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  values_ *= scale;
  CheckFinite();
  return *this;
}

ParamVector operator/(ParamVector a, double s) {
  a.values_ /= s;
  a.CheckFinite();
  return a;
}

bool operator==(const ParamVector& a, const ParamVector& b) {
  return a.dim() == b.dim() &&
         std::memcmp(a.values_.data(), b.values_.data(),
                     a.dim() * sizeof(double)) == 0;
}

void ParamVector::CheckFinite() const {
  if (!values_.allFinite()) {
    throw NonFiniteError("parameter vector has a non-finite entry");
  }
}

void ParamVector::CheckSameDim(const ParamVector& other) const {
  if (other.dim() != dim()) {
    throw DimensionError("dimension mismatch: " + std::to_string(dim()) +
                         " vs " + std::to_string(other.dim()));
  }
}

}  // namespace fedring
