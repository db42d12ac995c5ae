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

#include "fedring/adversary.h"

#include <cmath>
#include <limits>
#include <string>

#include "fedring/errors.h"

namespace fedring::adversary {
namespace {

using model::ModelKind;
using model::ModelSpec;

constexpr double kCollinearTolerance = 1e-6;

void CheckClassifier(const ModelSpec& spec, std::size_t dim) {
  if (!spec.is_classifier()) {
    throw ArgumentError("label extraction needs a cross-entropy classifier");
  }
  if (dim != spec.param_dim()) {
    throw DimensionError("gradient dimension does not match the model");
  }
}

DatasetShard SingleSample(const Eigen::VectorXd& x, int label) {
  RowMatrix in = x.transpose();
  Eigen::VectorXd t(1);
  t[0] = label;
  return DatasetShard(std::move(in), std::move(t), "dummy");
}

// Best guess when the observed vector is not a clean single-sample gradient:
// the most negative final-layer bias entry.
int FallbackLabel(const ParamVector& grad, const ModelSpec& spec) {
  const auto layout = model::FinalLayer(spec);
  int best = 0;
  for (int c = 1; c < layout.rows; ++c) {
    if (grad[layout.bias_offset + c] < grad[layout.bias_offset + best]) best = c;
  }
  return best;
}

double LossOrInf(const AttackTarget& target, const Eigen::VectorXd& x,
                 int label) {
  if (!x.allFinite()) return std::numeric_limits<double>::infinity();
  try {
    const double l = GradientMatchLoss(target, x, label);
    return std::isfinite(l) ? l : std::numeric_limits<double>::infinity();
  } catch (const NonFiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// d L_G / d x for softmax regression, in closed form.
Eigen::VectorXd LogisticMatchGradient(const ModelSpec& spec,
                                      const ParamVector& w,
                                      const ParamVector& observed,
                                      const Eigen::VectorXd& x, int label) {
  const int classes = spec.output_dim();
  const int d = spec.input_dim();
  Eigen::Map<const RowMatrix> weights(w.values().data(), classes, d);
  Eigen::Map<const Eigen::VectorXd> bias(w.values().data() + classes * d, classes);
  Eigen::Map<const RowMatrix> obs_w(observed.values().data(), classes, d);
  Eigen::Map<const Eigen::VectorXd> obs_b(observed.values().data() + classes * d,
                                          classes);

  const Eigen::VectorXd z = weights * x + bias;
  Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp().matrix();
  p /= p.sum();
  Eigen::VectorXd e = p;
  e[label] -= 1.0;

  const RowMatrix rw = e * x.transpose() - obs_w;
  const Eigen::VectorXd rb = e - obs_b;
  // Through x directly, then through e = softmax(Wx + b) - y.
  const Eigen::VectorXd u = 2.0 * (rw * x + rb);
  const Eigen::VectorXd su = p.cwiseProduct(u) - p * p.dot(u);
  return 2.0 * rw.transpose() * e + weights.transpose() * su;
}

Eigen::VectorXd FiniteDifferenceMatchGradient(const AttackTarget& target,
                                              const Eigen::VectorXd& x,
                                              int label) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    probe[j] = x[j] + h;
    const double up = GradientMatchLoss(target, probe, label);
    probe[j] = x[j] - h;
    const double down = GradientMatchLoss(target, probe, label);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

std::string_view ToString(Provenance p) {
  switch (p) {
    case Provenance::kFedAvgUserUpload: return "fedavg-user-upload";
    case Provenance::kCsaheIntermediateDecrypted: return "csahe-intermediate-decrypted";
    case Provenance::kCsaheFinalAggregate: return "csahe-final-aggregate";
  }
  return "?";
}

ParamVector AttackTarget::ImpliedGradient() const {
  if (context.update_scale == 0.0 || !std::isfinite(context.update_scale)) {
    throw ArgumentError("update_scale must be finite and non-zero");
  }
  return observed_gradient / context.update_scale;
}

int ExtractLabel(const ParamVector& grad, const ModelSpec& spec) {
  CheckClassifier(spec, grad.dim());
  const auto layout = model::FinalLayer(spec);
  const Eigen::VectorXd& g = grad.values();
  Eigen::Map<const RowMatrix> rows(g.data() + layout.weight_offset, layout.rows,
                                   layout.cols);
  Eigen::Map<const Eigen::VectorXd> bias(g.data() + layout.bias_offset,
                                         layout.rows);
  Eigen::Index ref = 0;
  if (bias.cwiseAbs().maxCoeff(&ref) == 0.0) {
    throw AmbiguityError("zero final-layer gradient carries no label");
  }
  // Every row must be bias_c times one shared activation vector.
  const Eigen::RowVectorXd activation = rows.row(ref) / bias[ref];
  for (int c = 0; c < layout.rows; ++c) {
    const double residual = (rows.row(c) - bias[c] * activation).norm();
    const double scale = rows.row(c).norm() + std::abs(bias[c]) * activation.norm();
    if (residual > kCollinearTolerance * scale) {
      throw AmbiguityError(
          "final-layer rows do not share one activation; not a single-sample "
          "gradient");
    }
  }
  int label = -1;
  for (int c = 0; c < layout.rows; ++c) {
    if (bias[c] < 0.0) {
      if (label >= 0) throw AmbiguityError("more than one negative row");
      label = c;
    }
  }
  if (label < 0) throw AmbiguityError("no negative final-layer row");
  return label;
}

double GradientMatchLoss(const AttackTarget& target, const Eigen::VectorXd& x,
                         int label) {
  const auto& ctx = target.context;
  const ParamVector dummy =
      model::Grad(ctx.model_spec, ctx.server_weights, SingleSample(x, label));
  return (dummy.values() - target.ImpliedGradient().values()).squaredNorm();
}

AttackResult IdlgAttack(const AttackTarget& target, const AttackOptions& options,
                        SeededRng& rng,
                        std::optional<Eigen::VectorXd> initial_dummy) {
  if (options.iterations < 1) throw ArgumentError("iterations must be >= 1");
  if (!(options.eta > 0.0)) throw ArgumentError("eta must be positive");
  const auto& ctx = target.context;
  const ModelSpec& spec = ctx.model_spec;
  CheckClassifier(spec, target.observed_gradient.dim());
  if (ctx.server_weights.dim() != spec.param_dim()) {
    throw DimensionError("server weights do not match the model");
  }
  const ParamVector implied = target.ImpliedGradient();

  AttackResult result;
  try {
    result.dummy_label = ExtractLabel(implied, spec);
    result.label_extracted = true;
  } catch (const AmbiguityError&) {
    result.dummy_label = FallbackLabel(implied, spec);
  }
  const int label = result.dummy_label;

  Eigen::VectorXd x(spec.input_dim());
  if (initial_dummy) {
    if (initial_dummy->size() != spec.input_dim()) {
      throw DimensionError("initial dummy has the wrong dimension");
    }
    x = *initial_dummy;
  } else {
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.Normal();
  }

  double loss = LossOrInf(target, x, label);
  if (!std::isfinite(loss)) throw NonFiniteError("initial gradient-match loss is not finite");
  for (int it = 0; it < options.iterations; ++it) {
    result.loss_curve.push_back(loss);
    if (options.snapshot_every > 0 && it % options.snapshot_every == 0) {
      result.snapshots.push_back({it, x});
    }
    if (loss == 0.0) break;
    const Eigen::VectorXd g =
        spec.kind == ModelKind::kLogisticRegression
            ? LogisticMatchGradient(spec, ctx.server_weights, implied, x, label)
            : FiniteDifferenceMatchGradient(target, x, label);
    if (!g.allFinite()) throw NonFiniteError("gradient of the match loss is not finite");

    double step = options.eta;
    bool accepted = false;
    bool any_finite = false;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      Eigen::VectorXd candidate = x - step * g;
      const double l = LossOrInf(target, candidate, label);
      any_finite = any_finite || std::isfinite(l);
      if (l <= loss) {
        x = std::move(candidate);
        loss = l;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!any_finite) throw NonFiniteError("iDLG diverged after all step halvings");
      break;  // stationary to working precision
    }
  }

  result.dummy_data = x;
  result.best_candidate = -1;
  result.reconstruction_mse = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t c = 0; c < ctx.candidates.size(); ++c) {
    if (ctx.candidates[c].size() != x.size()) {
      throw DimensionError("candidate sample has the wrong dimension");
    }
    const double mse = (x - ctx.candidates[c]).squaredNorm() / static_cast<double>(x.size());
    if (result.best_candidate < 0 || mse < result.reconstruction_mse) {
      result.reconstruction_mse = mse;
      result.best_candidate = static_cast<int>(c);
    }
  }
  return result;
}

AttackResult IdlgAttack(const Observation& observation,
                        const AttackOptions& options, SeededRng& rng) {
  if (const auto* target = std::get_if<AttackTarget>(&observation)) {
    return IdlgAttack(*target, options, rng);
  }
  throw TypeError("observation is ciphertext only; no plaintext gradient to invert");
}

Observation Intercept(std::span<const engine::Upload> uploads, std::size_t hop,
                      const AttackContext& context) {
  if (hop >= uploads.size()) {
    throw IndexError("hop " + std::to_string(hop) + " beyond " +
                     std::to_string(uploads.size()) + " uploads");
  }
  return AttackTarget{uploads[hop].delta, Provenance::kFedAvgUserUpload, context};
}

Observation Intercept(const csahe::RingState& ring, std::size_t hop) {
  if (hop >= ring.trace.size()) {
    throw IndexError("hop " + std::to_string(hop) + " beyond ring of " +
                     std::to_string(ring.trace.size()) + " messages");
  }
  const auto& m = ring.trace[hop];
  return CiphertextObservation{hop, m.sender, m.receiver, m.payload.scheme,
                               m.payload.dim, csahe::Serialize(m.payload)};
}

AttackTarget HbcView(const csahe::RingState& ring, std::size_t hop,
                     const csahe::PrivateKey& leaked_sk,
                     const FixedPointCodec& codec, const AttackContext& context) {
  if (hop >= ring.trace.size()) {
    throw IndexError("hop " + std::to_string(hop) + " beyond ring of " +
                     std::to_string(ring.trace.size()) + " messages");
  }
  return {csahe::DecryptVector(ring.trace[hop].payload, leaked_sk, codec),
          Provenance::kCsaheIntermediateDecrypted, context};
}

AttackTarget AggregateView(const ParamVector& aggregate,
                           const AttackContext& context) {
  return {aggregate, Provenance::kCsaheFinalAggregate, context};
}

}  // namespace fedring::adversary
