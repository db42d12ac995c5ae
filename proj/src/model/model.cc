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

#include "fedring/model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedring/errors.h"

namespace fedring::model {
namespace {

using ConstRowMap = Eigen::Map<const RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using RowMap = Eigen::Map<RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

struct LayerView {
  ConstRowMap weights;
  ConstVecMap bias;
};

std::vector<LayerView> Layers(const ModelSpec& spec, const Eigen::VectorXd& w) {
  std::vector<LayerView> layers;
  const double* p = w.data();
  for (std::size_t l = 0; l + 1 < spec.layer_dims.size(); ++l) {
    const int in = spec.layer_dims[l];
    const int out = spec.layer_dims[l + 1];
    ConstRowMap weights(p, out, in);
    p += static_cast<std::ptrdiff_t>(out) * in;
    ConstVecMap bias(p, out);
    p += out;
    layers.push_back({weights, bias});
  }
  return layers;
}

void CheckInputs(const ModelSpec& spec, const ParamVector& w,
                 const DatasetShard& batch) {
  if (w.dim() != spec.param_dim()) {
    throw DimensionError("parameter dimension " + std::to_string(w.dim()) +
                         " does not match model dimension " +
                         std::to_string(spec.param_dim()));
  }
  batch.Validate();
  if (batch.empty()) throw DimensionError("batch is empty");
  if (batch.inputs.cols() != spec.input_dim()) {
    throw DimensionError("batch feature dimension " +
                         std::to_string(batch.inputs.cols()) +
                         " does not match model input " +
                         std::to_string(spec.input_dim()));
  }
  if (spec.is_classifier()) {
    for (Eigen::Index i = 0; i < batch.targets.size(); ++i) {
      const double t = batch.targets[i];
      if (t != std::floor(t) || t < 0 || t >= spec.output_dim()) {
        throw DimensionError("class target " + std::to_string(t) +
                             " outside [0, " +
                             std::to_string(spec.output_dim()) + ")");
      }
    }
  }
}

// Activations of every layer; front() is the input, back() the outputs.
std::vector<RowMatrix> ForwardAll(const ModelSpec& spec,
                                  const std::vector<LayerView>& layers,
                                  const RowMatrix& inputs) {
  std::vector<RowMatrix> acts;
  acts.push_back(inputs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    RowMatrix z = acts.back() * layers[l].weights.transpose();
    z.rowwise() += layers[l].bias.transpose();
    const bool hidden = l + 1 < layers.size();
    if (hidden && spec.kind == ModelKind::kMlp) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }
  return acts;
}

RowMatrix Softmax(const RowMatrix& logits) {
  RowMatrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp().matrix();
    p.row(i) = e / e.sum();
  }
  return p;
}

// d(mean loss)/d(outputs), one row per sample.
RowMatrix OutputDelta(const ModelSpec& spec, const RowMatrix& out,
                      const Eigen::VectorXd& targets) {
  const double m = static_cast<double>(out.rows());
  if (spec.is_classifier()) {
    RowMatrix d = Softmax(out);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      d(i, static_cast<Eigen::Index>(targets[i])) -= 1.0;
    }
    return d / m;
  }
  RowMatrix d = out;
  d.col(0) -= targets;
  return d / m;
}

// Backpropagates output deltas into a flat gradient.
Eigen::VectorXd Backward(const ModelSpec& spec,
                         const std::vector<LayerView>& layers,
                         const std::vector<RowMatrix>& acts, RowMatrix delta) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(spec.param_dim()));
  // Offsets of each layer's block, computed front to back.
  std::vector<std::ptrdiff_t> offsets;
  std::ptrdiff_t off = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_dims.size(); ++l) {
    offsets.push_back(off);
    off += static_cast<std::ptrdiff_t>(spec.layer_dims[l + 1]) *
               spec.layer_dims[l] +
           spec.layer_dims[l + 1];
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    const int in = spec.layer_dims[l];
    const int out = spec.layer_dims[l + 1];
    RowMap gw(g.data() + offsets[l], out, in);
    VecMap gb(g.data() + offsets[l] + static_cast<std::ptrdiff_t>(out) * in,
              out);
    gw.noalias() = delta.transpose() * acts[l];
    gb = delta.colwise().sum().transpose();
    if (l > 0) {
      RowMatrix back = delta * layers[l].weights;
      // tanh'(z) = 1 - tanh(z)^2
      back.array() *= 1.0 - acts[l].array().square();
      delta = std::move(back);
    }
  }
  return g;
}

}  // namespace

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinearRegression: return "linear-regression";
    case ModelKind::kLogisticRegression: return "logistic-regression";
    case ModelKind::kMlp: return "mlp";
  }
  return "?";
}

std::string_view ToString(LossKind loss) {
  return loss == LossKind::kSquaredError ? "squared-error" : "cross-entropy";
}

std::string_view ToString(HvpBackend backend) {
  return backend == HvpBackend::kExact ? "exact" : "finite-difference";
}

ModelKind ParseModelKind(std::string_view s) {
  if (s == "linear-regression") return ModelKind::kLinearRegression;
  if (s == "logistic-regression") return ModelKind::kLogisticRegression;
  if (s == "mlp") return ModelKind::kMlp;
  throw ArgumentError("unknown model kind '" + std::string(s) + "'");
}

LossKind ParseLossKind(std::string_view s) {
  if (s == "squared-error") return LossKind::kSquaredError;
  if (s == "cross-entropy") return LossKind::kCrossEntropy;
  throw ArgumentError("unknown loss '" + std::string(s) + "'");
}

HvpBackend ParseHvpBackend(std::string_view s) {
  if (s == "finite-difference") return HvpBackend::kFiniteDifference;
  if (s == "exact") return HvpBackend::kExact;
  throw ArgumentError("unknown hvp backend '" + std::string(s) + "'");
}

ModelSpec ModelSpec::LinearRegression(int inputs) {
  ModelSpec s{ModelKind::kLinearRegression, {inputs, 1}, LossKind::kSquaredError};
  s.Validate();
  return s;
}

ModelSpec ModelSpec::LogisticRegression(int inputs, int classes) {
  ModelSpec s{ModelKind::kLogisticRegression, {inputs, classes},
              LossKind::kCrossEntropy};
  s.Validate();
  return s;
}

ModelSpec ModelSpec::Mlp(int inputs, int hidden, int outputs, LossKind loss) {
  ModelSpec s{ModelKind::kMlp, {inputs, hidden, outputs}, loss};
  s.Validate();
  return s;
}

void ModelSpec::Validate() const {
  for (int d : layer_dims) {
    if (d < 1) throw ArgumentError("layer widths must be positive");
  }
  switch (kind) {
    case ModelKind::kLinearRegression:
      if (layer_dims.size() != 2 || layer_dims[1] != 1 ||
          loss != LossKind::kSquaredError) {
        throw ArgumentError(
            "linear regression needs layer_dims {in, 1} and squared error");
      }
      break;
    case ModelKind::kLogisticRegression:
      if (layer_dims.size() != 2 || layer_dims[1] < 2 ||
          loss != LossKind::kCrossEntropy) {
        throw ArgumentError(
            "logistic regression needs layer_dims {in, classes>=2} and "
            "cross-entropy");
      }
      break;
    case ModelKind::kMlp:
      if (layer_dims.size() != 3) {
        throw ArgumentError("mlp needs layer_dims {in, hidden, out}");
      }
      if (loss == LossKind::kSquaredError && layer_dims[2] != 1) {
        throw ArgumentError("squared-error mlp must have one output");
      }
      if (loss == LossKind::kCrossEntropy && layer_dims[2] < 2) {
        throw ArgumentError("cross-entropy mlp needs >= 2 outputs");
      }
      break;
  }
}

std::size_t ModelSpec::param_dim() const {
  std::size_t d = 0;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    d += static_cast<std::size_t>(layer_dims[l + 1]) *
             static_cast<std::size_t>(layer_dims[l]) +
         static_cast<std::size_t>(layer_dims[l + 1]);
  }
  return d;
}

FinalLayerLayout FinalLayer(const ModelSpec& spec) {
  const int rows = spec.layer_dims.back();
  const int cols = spec.layer_dims[spec.layer_dims.size() - 2];
  const std::size_t bias_offset = spec.param_dim() - static_cast<std::size_t>(rows);
  return {bias_offset - static_cast<std::size_t>(rows) * cols, bias_offset,
          rows, cols};
}

RowMatrix Forward(const ModelSpec& spec, const ParamVector& w,
                  const RowMatrix& inputs) {
  if (w.dim() != spec.param_dim()) {
    throw DimensionError("parameter dimension does not match model");
  }
  if (inputs.cols() != spec.input_dim()) {
    throw DimensionError("input width does not match model");
  }
  return ForwardAll(spec, Layers(spec, w.values()), inputs).back();
}

double Loss(const ModelSpec& spec, const ParamVector& w,
            const DatasetShard& batch) {
  CheckInputs(spec, w, batch);
  const RowMatrix out = Forward(spec, w, batch.inputs);
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (spec.is_classifier()) {
      const double mx = out.row(i).maxCoeff();
      const double lse =
          mx + std::log((out.row(i).array() - mx).exp().sum());
      total += lse - out(i, static_cast<Eigen::Index>(batch.targets[i]));
    } else {
      const double r = out(i, 0) - batch.targets[i];
      total += 0.5 * r * r;
    }
  }
  return total / static_cast<double>(out.rows());
}

ParamVector Grad(const ModelSpec& spec, const ParamVector& w,
                 const DatasetShard& batch) {
  CheckInputs(spec, w, batch);
  const auto layers = Layers(spec, w.values());
  const auto acts = ForwardAll(spec, layers, batch.inputs);
  return ParamVector(
      Backward(spec, layers, acts, OutputDelta(spec, acts.back(), batch.targets)));
}

ParamVector Hvp(const ModelSpec& spec, const ParamVector& w,
                const ParamVector& v, const DatasetShard& batch,
                HvpBackend backend) {
  CheckInputs(spec, w, batch);
  if (v.dim() != w.dim()) {
    throw DimensionError("hvp direction dimension does not match parameters");
  }
  if (backend == HvpBackend::kExact && spec.kind == ModelKind::kMlp) {
    throw ArgumentError("exact hvp is only available for linear and logistic models");
  }
  if (v.NormInf() == 0.0) return ParamVector::Zeros(w.dim());

  if (backend == HvpBackend::kFiniteDifference) {
    const double eps = 1e-5 * (1.0 + w.NormInf());
    const ParamVector step = v * eps;
    return (Grad(spec, w + step, batch) - Grad(spec, w - step, batch)) /
           (2.0 * eps);
  }

  const auto layers = Layers(spec, w.values());
  const auto vlayers = Layers(spec, v.values());
  const RowMatrix& x = batch.inputs;
  const double m = static_cast<double>(x.rows());
  // Directional derivative of the outputs along v.
  RowMatrix dz = x * vlayers[0].weights.transpose();
  dz.rowwise() += vlayers[0].bias.transpose();

  switch (spec.kind) {
    case ModelKind::kLinearRegression:
      break;
    case ModelKind::kLogisticRegression: {
      const auto acts = ForwardAll(spec, layers, x);
      const RowMatrix p = Softmax(acts.back());
      // (diag(p) - p p^T) dz per row
      const Eigen::VectorXd pdz = (p.array() * dz.array()).rowwise().sum();
      RowMatrix q = p.array() * (dz.colwise() - pdz).array();
      dz = std::move(q);
      break;
    }
    case ModelKind::kMlp:
      throw ArgumentError("exact hvp is available for linear and logistic "
                          "regression only");
  }
  // For one-layer models the Hessian product is x^T (curvature * dz) / m.
  Eigen::VectorXd g(static_cast<Eigen::Index>(spec.param_dim()));
  const int out = spec.output_dim();
  const int in = spec.input_dim();
  RowMap gw(g.data(), out, in);
  VecMap gb(g.data() + static_cast<std::ptrdiff_t>(out) * in, out);
  gw.noalias() = dz.transpose() * x / m;
  gb = dz.colwise().sum().transpose() / m;
  return ParamVector(std::move(g));
}

std::vector<int> PredictClasses(const ModelSpec& spec, const ParamVector& w,
                                const RowMatrix& inputs) {
  if (!spec.is_classifier()) {
    throw ArgumentError("class prediction needs a classifier");
  }
  const RowMatrix out = Forward(spec, w, inputs);
  std::vector<int> classes(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    Eigen::Index best = 0;
    out.row(i).maxCoeff(&best);
    classes[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return classes;
}

double Accuracy(const ModelSpec& spec, const ParamVector& w,
                const DatasetShard& data) {
  if (data.empty()) throw DimensionError("accuracy of an empty shard");
  const auto predicted = PredictClasses(spec, w, data.inputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == static_cast<int>(data.targets[static_cast<Eigen::Index>(i)])) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

ParamVector InitialWeights(const ModelSpec& spec, SeededRng& rng) {
  spec.Validate();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.param_dim()));
  if (spec.kind != ModelKind::kMlp) return ParamVector(std::move(w));
  std::ptrdiff_t off = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_dims.size(); ++l) {
    const int in = spec.layer_dims[l];
    const int out = spec.layer_dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(out) * in; ++k) {
      w[off + k] = bound * (2.0 * rng.Uniform() - 1.0);
    }
    off += static_cast<std::ptrdiff_t>(out) * in + out;
  }
  return ParamVector(std::move(w));
}

}  // namespace fedring::model
