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

#ifndef FEDRING_MODEL_H_
#define FEDRING_MODEL_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fedring/dataset.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"

namespace fedring::model {

enum class ModelKind { kLinearRegression, kLogisticRegression, kMlp };
enum class LossKind { kSquaredError, kCrossEntropy };
enum class HvpBackend { kFiniteDifference, kExact };

std::string_view ToString(ModelKind kind);
std::string_view ToString(LossKind loss);
std::string_view ToString(HvpBackend backend);
ModelKind ParseModelKind(std::string_view s);
LossKind ParseLossKind(std::string_view s);
HvpBackend ParseHvpBackend(std::string_view s);

// Architecture of a small differentiable model.
//
// layer_dims lists widths from input to output: {in, 1} for linear
// regression, {in, classes} for softmax regression and {in, hidden, out} for
// the one-hidden-layer tanh MLP. Every layer has a bias. Parameters are laid
// out layer by layer as a row-major weight matrix followed by its bias, so
// the final layer always sits at the end of the vector.
struct ModelSpec {
  ModelKind kind = ModelKind::kLogisticRegression;
  std::vector<int> layer_dims;
  LossKind loss = LossKind::kCrossEntropy;

  static ModelSpec LinearRegression(int inputs);
  static ModelSpec LogisticRegression(int inputs, int classes);
  static ModelSpec Mlp(int inputs, int hidden, int outputs, LossKind loss);

  void Validate() const;
  std::size_t param_dim() const;
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  bool is_classifier() const { return loss == LossKind::kCrossEntropy; }
};

struct FinalLayerLayout {
  std::size_t weight_offset;
  std::size_t bias_offset;
  int rows;  // output units
  int cols;  // width of the activation feeding the layer
};
FinalLayerLayout FinalLayer(const ModelSpec& spec);

// Mean loss over the batch: 0.5 * (prediction - target)^2 for squared error,
// -log softmax(target) for cross-entropy.
double Loss(const ModelSpec& spec, const ParamVector& w,
            const DatasetShard& batch);

// Gradient of Loss with respect to the parameters.
ParamVector Grad(const ModelSpec& spec, const ParamVector& w,
                 const DatasetShard& batch);

// Hessian-vector product of Loss at w applied to v.
//
// kFiniteDifference uses (grad(w + eps v) - grad(w - eps v)) / (2 eps) with
// eps = 1e-5 * (1 + |w|_inf). kExact is the analytic product, available for
// linear and softmax regression only.
ParamVector Hvp(const ModelSpec& spec, const ParamVector& w,
                const ParamVector& v, const DatasetShard& batch,
                HvpBackend backend = HvpBackend::kFiniteDifference);

// Raw model outputs (regression values or logits), one row per sample.
RowMatrix Forward(const ModelSpec& spec, const ParamVector& w,
                  const RowMatrix& inputs);

std::vector<int> PredictClasses(const ModelSpec& spec, const ParamVector& w,
                                const RowMatrix& inputs);

// Fraction of correctly classified samples. Classifiers only.
double Accuracy(const ModelSpec& spec, const ParamVector& w,
                const DatasetShard& data);

// Zeros for linear and softmax regression; for the MLP, weights uniform in
// +-1/sqrt(fan_in) and zero biases.
ParamVector InitialWeights(const ModelSpec& spec, SeededRng& rng);

}  // namespace fedring::model

#endif  // FEDRING_MODEL_H_
