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
#include <fstream>

#include "doctest.h"
#include "fedring/adversary.h"
#include "fedring/cipher.h"
#include "fedring/csahe.h"
#include "fedring/errors.h"
#include "test_util.h"

namespace fedring::adversary {
namespace {

using model::ModelSpec;

DatasetShard One(const Eigen::VectorXd& x, int label) {
  RowMatrix in(1, x.size());
  in.row(0) = x.transpose();
  return DatasetShard(in, Eigen::VectorXd::Constant(1, label), "victim");
}

AttackTarget Target(const ModelSpec& spec, const ParamVector& w,
                    const Eigen::VectorXd& x, int label) {
  AttackContext ctx;
  ctx.model_spec = spec;
  ctx.server_weights = w;
  ctx.candidates = {x};
  return {model::Grad(spec, w, One(x, label)), Provenance::kFedAvgUserUpload, ctx};
}

TEST_SUITE("adversary") {

TEST_CASE("Label extraction on single-sample gradients") {
  SeededRng rng(1, "labels");
  for (const auto& spec : {ModelSpec::LogisticRegression(6, 4),
                           ModelSpec::Mlp(6, 5, 3, model::LossKind::kCrossEntropy)}) {
    for (int t = 0; t < 50; ++t) {
      const auto w = testing::RandomVector(spec.param_dim(), -0.5, 0.5, rng);
      Eigen::VectorXd x(6);
      for (auto& v : x) v = rng.Normal();
      const int label = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(spec.output_dim())));
      CHECK(ExtractLabel(model::Grad(spec, w, One(x, label)), spec) == label);
      // Positive or negative update scales are undone before extraction.
      auto target = Target(spec, w, x, label);
      target.observed_gradient = -0.01 * target.observed_gradient;
      target.context.update_scale = -0.01;
      CHECK(ExtractLabel(target.ImpliedGradient(), spec) == label);
    }
  }
}

TEST_CASE("Label extraction refuses batches and zero gradients") {
  SeededRng rng(2, "ambiguous");
  const auto spec = ModelSpec::LogisticRegression(4, 3);
  const auto batch = testing::RandomShard(5, 4, 3, rng);
  const auto w = testing::RandomVector(spec.param_dim(), -1, 1, rng);
  CHECK_THROWS_AS(ExtractLabel(model::Grad(spec, w, batch), spec), AmbiguityError);
  CHECK_THROWS_AS(ExtractLabel(ParamVector::Zeros(spec.param_dim()), spec), AmbiguityError);
  CHECK_THROWS_AS(ExtractLabel(ParamVector::Zeros(5), ModelSpec::LinearRegression(4)),
                  ArgumentError);
}

TEST_CASE("Gradient-match loss is zero at the true sample and the attack stops") {
  SeededRng rng(3, "zero");
  const auto spec = ModelSpec::LogisticRegression(5, 2);
  const auto w = testing::RandomVector(spec.param_dim(), -1, 1, rng);
  Eigen::VectorXd x(5);
  for (auto& v : x) v = rng.Normal();
  const auto target = Target(spec, w, x, 1);
  CHECK(GradientMatchLoss(target, x, 1) == 0.0);
  const auto r = IdlgAttack(target, AttackOptions{}, rng, x);
  CHECK(r.loss_curve.size() == 1);
  CHECK(r.loss_curve[0] == 0.0);
  CHECK(r.reconstruction_mse == 0.0);
  CHECK(r.best_candidate == 0);
}

TEST_CASE("iDLG reconstructs an unprotected single-sample upload") {
  SeededRng rng(4, "recon");
  const auto spec = ModelSpec::LogisticRegression(16, 3);
  const auto w = testing::RandomVector(spec.param_dim(), -0.5, 0.5, rng);
  Eigen::VectorXd x(16);
  for (auto& v : x) v = rng.Normal();
  const auto r = IdlgAttack(Target(spec, w, x, 2), AttackOptions{}, rng);
  CHECK(r.label_extracted);
  CHECK(r.dummy_label == 2);
  CHECK(r.reconstruction_mse < 1e-3);
  for (std::size_t i = 1; i < r.loss_curve.size(); ++i) {
    CHECK(r.loss_curve[i] <= r.loss_curve[i - 1]);
  }
}

TEST_CASE("iDLG works through an MLP with finite-difference gradients") {
  SeededRng rng(5, "mlp");
  const auto spec = ModelSpec::Mlp(4, 6, 2, model::LossKind::kCrossEntropy);
  const auto w = model::InitialWeights(spec, rng);
  Eigen::VectorXd x(4);
  for (auto& v : x) v = rng.Normal();
  AttackOptions opts;
  opts.iterations = 300;
  const auto r = IdlgAttack(Target(spec, w, x, 0), opts, rng);
  CHECK(r.loss_curve.back() < r.loss_curve.front());
}

TEST_CASE("Snapshots and options") {
  SeededRng rng(6, "snap");
  const auto spec = ModelSpec::LogisticRegression(4, 2);
  const auto w = testing::RandomVector(spec.param_dim(), -1, 1, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  AttackOptions opts;
  opts.iterations = 20;
  opts.snapshot_every = 5;
  const auto r = IdlgAttack(Target(spec, w, x, 0), opts, rng);
  REQUIRE(!r.snapshots.empty());
  CHECK(r.snapshots[0].iteration == 0);
  if (r.snapshots.size() > 1) CHECK(r.snapshots[1].iteration == 5);
  opts.iterations = 0;
  CHECK_THROWS_AS(IdlgAttack(Target(spec, w, x, 0), opts, rng), ArgumentError);
  const auto j = ToJson(r);
  CHECK(j["label"] == r.dummy_label);
  CHECK(j["loss_curve"].size() == r.loss_curve.size());
  AttackContext bare;
  bare.model_spec = spec;
  bare.server_weights = w;
  const AttackTarget no_candidates{Target(spec, w, x, 0).observed_gradient,
                                   Provenance::kFedAvgUserUpload, bare};
  opts.iterations = 3;
  const auto nc = IdlgAttack(no_candidates, opts, rng);
  CHECK(std::isnan(nc.reconstruction_mse));
  CHECK(ToJson(nc)["mse"].is_null());
}

TEST_CASE("Vantages: plaintext uploads, ciphertext hops, leaked key, aggregate") {
  SeededRng rng(7, "vantage");
  const auto spec = ModelSpec::LogisticRegression(3, 2);
  AttackContext ctx;
  ctx.model_spec = spec;
  ctx.server_weights = ParamVector::Zeros(spec.param_dim());
  const std::vector<engine::Upload> uploads{{0, ParamVector::Zeros(8)}, {1, ParamVector::Zeros(8)}};
  CHECK(PlaintextAvailable(Intercept(uploads, 1, ctx)));
  CHECK_THROWS_AS(Intercept(uploads, 2, ctx), IndexError);

  SeededRng key_rng(8, "keys");
  const auto keys = csahe::Keygen(1024, FixedPointCodec{}, key_rng);
  std::vector<ParamVector> g;
  for (int i = 0; i < 3; ++i) g.push_back(testing::RandomVector(8, -1, 1, rng));
  const ParamVector mask = csahe::MakeMask(8, 150.0, rng).values;
  const auto ring = csahe::RingAggregateWithMask(g, keys, 1, mask, rng).ring;
  const auto obs = Intercept(ring, 0);
  CHECK_FALSE(PlaintextAvailable(obs));
  CHECK_THROWS_AS(IdlgAttack(obs, AttackOptions{}, rng), TypeError);
  CHECK_THROWS_AS(Intercept(ring, 3), IndexError);
  const auto& c = std::get<CiphertextObservation>(obs);
  CHECK(c.sender == 1);
  CHECK(c.receiver == 2);
  CHECK(c.dim == 8);

  // Hop k holds the initiator's masked gradient plus the next k gradients.
  const auto view = HbcView(ring, 1, keys.private_key, keys.codec, ctx);
  CHECK(view.provenance == Provenance::kCsaheIntermediateDecrypted);
  CHECK((view.observed_gradient - (g[1] + mask + g[2])).NormInf() < 1e-8);
  SeededRng other_rng(9, "other");
  const auto other = csahe::Keygen(1024, FixedPointCodec{}, other_rng);
  CHECK_THROWS_AS(HbcView(ring, 1, other.private_key, keys.codec, ctx), DecryptError);
  CHECK(AggregateView(g[0], ctx).provenance == Provenance::kCsaheFinalAggregate);
}

TEST_CASE("PGM export") {
  const auto dir = testing::TempDir("pgm");
  Eigen::VectorXd img(9);
  img << 0, 1, 2, 3, 4, 5, 6, 7, 8;
  WritePgm(dir / "a.pgm", img);
  const std::string bytes = testing::ReadFile(dir / "a.pgm");
  CHECK(bytes.rfind("P5\n3 3\n255\n", 0) == 0);
  CHECK(static_cast<unsigned char>(bytes.back()) == 255);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 9]) == 0);
  CHECK_THROWS_AS(WritePgm(dir / "b.pgm", Eigen::VectorXd::Ones(8)), ShapeError);
  CHECK(IsPerfectSquare(64));
  CHECK_FALSE(IsPerfectSquare(63));
}

}  // TEST_SUITE

}  // namespace
}  // namespace fedring::adversary
