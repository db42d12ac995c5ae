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

#ifndef FEDRING_PARAM_VECTOR_H_
#define FEDRING_PARAM_VECTOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fedring {

// Flat real vector holding model parameters or parameter deltas.
//
// The dimension is fixed at construction. Every constructor and arithmetic
// operator verifies that all entries are finite and throws NonFiniteError
// otherwise, so a diverging optimizer surfaces at the first bad iterate.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(Eigen::VectorXd values);
  explicit ParamVector(std::span<const double> values);
  ParamVector(std::initializer_list<double> values);

  static ParamVector Zeros(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::vector<double> ToStdVector() const;

  double NormInf() const;
  double Norm2() const;
  double Dot(const ParamVector& other) const;

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);

  friend ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
  friend ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
  friend ParamVector operator*(ParamVector a, double s) { return a *= s; }
  friend ParamVector operator*(double s, ParamVector a) { return a *= s; }
  friend ParamVector operator/(ParamVector a, double s);
  friend ParamVector operator-(ParamVector a) { return a *= -1.0; }

  // Bitwise comparison of the stored doubles.
  friend bool operator==(const ParamVector& a, const ParamVector& b);

 private:
  void CheckFinite() const;
  void CheckSameDim(const ParamVector& other) const;

  Eigen::VectorXd values_;
};

}  // namespace fedring

#endif  // FEDRING_PARAM_VECTOR_H_
