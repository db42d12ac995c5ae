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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fedring/errors.h"
#include "fedring/model.h"
#include "test_util.h"

namespace fedring::model {
namespace {

using testing::RandomShard;
using testing::RandomVector;

// Loss written with plain loops over the documented parameter layout:
// per layer a row-major weight block followed by its bias, tanh between
// layers.
double ScalarLoss(const ModelSpec& spec, const std::vector<double>& w,
                  const DatasetShard& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> a(data.feature_dim());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = data.inputs(i, j);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_dims.size(); ++l) {
      const int in = spec.layer_dims[l];
      const int out = spec.layer_dims[l + 1];
      std::vector<double> z(out);
      for (int r = 0; r < out; ++r) {
        double s = w[off + static_cast<std::size_t>(out * in + r)];
        for (int c = 0; c < in; ++c) s += w[off + static_cast<std::size_t>(r * in + c)] * a[c];
        z[r] = s;
      }
      off += static_cast<std::size_t>(out * in + out);
      if (l + 2 < spec.layer_dims.size()) {
        for (auto& v : z) v = std::tanh(v);
      }
      a = z;
    }
    if (spec.is_classifier()) {
      double se = 0.0;
      for (double v : a) se += std::exp(v);
      total += std::log(se) - a[static_cast<std::size_t>(data.targets[i])];
    } else {
      const double r = a[0] - data.targets[i];
      total += 0.5 * r * r;
    }
  }
  return total / static_cast<double>(data.size());
}

std::vector<ModelSpec> AllSpecs() {
  return {ModelSpec::LinearRegression(5), ModelSpec::LogisticRegression(5, 3),
          ModelSpec::Mlp(5, 4, 3, LossKind::kCrossEntropy),
          ModelSpec::Mlp(5, 4, 1, LossKind::kSquaredError)};
}

TEST_SUITE("model") {

TEST_CASE("Spec shapes") {
  CHECK(ModelSpec::LinearRegression(4).param_dim() == 5);
  CHECK(ModelSpec::LogisticRegression(4, 3).param_dim() == 15);
  CHECK(ModelSpec::Mlp(4, 6, 2, LossKind::kCrossEntropy).param_dim() == 4 * 6 + 6 + 6 * 2 + 2);
  const auto fl = FinalLayer(ModelSpec::Mlp(4, 6, 2, LossKind::kCrossEntropy));
  CHECK(fl.weight_offset == 30);
  CHECK(fl.bias_offset == 42);
  CHECK(fl.rows == 2);
  CHECK(fl.cols == 6);
  CHECK(ParseModelKind(ToString(ModelKind::kMlp)) == ModelKind::kMlp);
  CHECK_THROWS(ParseModelKind("svm"));
}

TEST_CASE("Loss matches an independent scalar implementation") {
  SeededRng rng(11, "loss");
  for (const auto& spec : AllSpecs()) {
    const auto data = RandomShard(9, 5, spec.is_classifier() ? spec.output_dim() : 0, rng);
    for (int t = 0; t < 10; ++t) {
      const auto w = RandomVector(spec.param_dim(), -1, 1, rng);
      CHECK(Loss(spec, w, data) == doctest::Approx(ScalarLoss(spec, w.ToStdVector(), data)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gradient agrees with central finite differences on 100 draws") {
  SeededRng rng(12, "grad");
  for (const auto& spec : AllSpecs()) {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto data = RandomShard(6, 5, spec.is_classifier() ? spec.output_dim() : 0, rng);
      const auto w = RandomVector(spec.param_dim(), -1, 1, rng);
      const auto g = Grad(spec, w, data);
      std::vector<double> base = w.ToStdVector();
      Eigen::VectorXd fd(static_cast<Eigen::Index>(base.size()));
      const double h = 1e-6;
      for (std::size_t k = 0; k < base.size(); ++k) {
        auto plus = base, minus = base;
        plus[k] += h;
        minus[k] -= h;
        fd[static_cast<Eigen::Index>(k)] =
            (ScalarLoss(spec, plus, data) - ScalarLoss(spec, minus, data)) / (2 * h);
      }
      const double rel = (g.values() - fd).norm() / std::max(1e-12, fd.norm());
      worst = std::max(worst, rel);
    }
    INFO(ToString(spec.kind));
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("Hessian-vector products match the analytic Hessian on a quadratic") {
  SeededRng rng(13, "hvp");
  const auto spec = ModelSpec::LinearRegression(4);
  for (int t = 0; t < 20; ++t) {
    const auto data = RandomShard(12, 4, 0, rng);
    // Design matrix with the bias column: H = A^T A / m.
    Eigen::MatrixXd a(12, 5);
    a.leftCols(4) = data.inputs;
    a.col(4).setOnes();
    const Eigen::MatrixXd h = a.transpose() * a / 12.0;
    const auto w = RandomVector(5, -2, 2, rng);
    const auto v = RandomVector(5, -1, 1, rng);
    const Eigen::VectorXd want = h * v.values();
    for (auto backend : {HvpBackend::kFiniteDifference, HvpBackend::kExact}) {
      const auto got = Hvp(spec, w, v, data, backend);
      CHECK((got.values() - want).norm() / want.norm() <= 1e-4);
    }
    CHECK((Hvp(spec, w, v, data, HvpBackend::kExact).values() - want).norm() / want.norm() <= 1e-12);
  }
}

TEST_CASE("Exact logistic HVP matches finite differences of the gradient") {
  SeededRng rng(14, "hvp-logistic");
  const auto spec = ModelSpec::LogisticRegression(3, 3);
  const auto data = RandomShard(10, 3, 3, rng);
  const auto w = RandomVector(spec.param_dim(), -1, 1, rng);
  const auto v = RandomVector(spec.param_dim(), -1, 1, rng);
  const auto exact = Hvp(spec, w, v, data, HvpBackend::kExact);
  const auto fd = Hvp(spec, w, v, data, HvpBackend::kFiniteDifference);
  CHECK((exact.values() - fd.values()).norm() / exact.values().norm() <= 1e-5);
  CHECK(Hvp(spec, w, ParamVector::Zeros(spec.param_dim()), data) ==
        ParamVector::Zeros(spec.param_dim()));
  CHECK_THROWS_AS(Hvp(ModelSpec::Mlp(3, 2, 3, LossKind::kCrossEntropy),
                      ParamVector::Zeros(17), ParamVector::Zeros(17), data,
                      HvpBackend::kExact),
                  ArgumentError);
}

TEST_CASE("Predictions and accuracy") {
  const auto spec = ModelSpec::LogisticRegression(2, 2);
  // Class 1 when x0 > 0.
  const ParamVector w{-1, 0, 1, 0, 0, 0};
  RowMatrix x(4, 2);
  x << 1, 0, -1, 0, 2, 5, -3, 1;
  Eigen::VectorXd y(4);
  y << 1, 0, 0, 0;
  const DatasetShard data(x, y, "u");
  CHECK(PredictClasses(spec, w, x) == std::vector<int>{1, 0, 1, 0});
  CHECK(Accuracy(spec, w, data) == doctest::Approx(0.75));
}

TEST_CASE("Input validation") {
  const auto spec = ModelSpec::LogisticRegression(2, 2);
  SeededRng rng(15, "validate");
  const auto data = RandomShard(3, 2, 2, rng);
  CHECK_THROWS_AS(Loss(spec, ParamVector::Zeros(5), data), DimensionError);
  CHECK_THROWS_AS(Grad(spec, ParamVector::Zeros(6), RandomShard(3, 3, 2, rng)), DimensionError);
  auto bad = data;
  bad.targets[0] = 7;
  CHECK_THROWS(Loss(spec, ParamVector::Zeros(6), bad));
  const auto init = InitialWeights(ModelSpec::Mlp(4, 3, 2, LossKind::kCrossEntropy), rng);
  CHECK(init.NormInf() <= 0.5);
  CHECK(init.NormInf() > 0.0);
  CHECK(InitialWeights(spec, rng) == ParamVector::Zeros(6));
}

}  // TEST_SUITE

}  // namespace
}  // namespace fedring::model
