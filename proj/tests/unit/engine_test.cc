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

#include <set>

#include "doctest.h"
#include "fedring/data_synth.h"
#include "fedring/engine.h"
#include "fedring/errors.h"
#include "test_util.h"

namespace fedring::engine {
namespace {

using model::ModelSpec;

std::vector<UserData> Users(int n, int samples, double shift, std::uint64_t seed,
                            int dim = 4) {
  auto p = data::HeterogeneityProfile::Uniform(n, samples, data::Task::kClassification,
                                               shift, dim);
  return data::MakeUsers(p, seed);
}

ExperimentConfig SmallConfig(Algorithm a) {
  ExperimentConfig c;
  c.algorithm = a;
  c.cipher = CipherKind::kNull;
  c.global_epochs = 4;
  c.local_epochs = 3;
  c.alpha = 0.05;
  c.beta = 0.1;
  c.batch_size = 16;
  c.seed = 3;
  return c;
}

TEST_SUITE("engine") {

TEST_CASE("Enum names round trip") {
  for (auto a : {Algorithm::kPppml, Algorithm::kFedAvg, Algorithm::kLocalOnly,
                 Algorithm::kCentralized}) {
    CHECK(ParseAlgorithm(ToString(a)) == a);
  }
  CHECK(ParseCipherKind("paillier") == CipherKind::kPaillier);
  CHECK_THROWS_AS(ParseAlgorithm("fedprox"), ConfigError);
  CHECK_THROWS_AS(ParseCipherKind("ckks"), ConfigError);
}

TEST_CASE("DrawBatches: disjoint slices with enough data, whole shard otherwise") {
  SeededRng rng(1, "batches");
  auto b = DrawBatches(100, 20, rng);
  std::set<std::size_t> all;
  for (const auto& batch : b) {
    CHECK(batch.size() == 20);
    all.insert(batch.begin(), batch.end());
  }
  CHECK(all.size() == 60);
  b = DrawBatches(7, 64, rng);
  for (const auto& batch : b) {
    CHECK(std::set<std::size_t>(batch.begin(), batch.end()).size() == 7);
  }
}

TEST_CASE("Per-FedAvg step matches the closed form on a quadratic") {
  SeededRng data_rng(2, "quad");
  const auto shard = testing::RandomShard(12, 1, 0, data_rng);
  const auto spec = ModelSpec::LinearRegression(1);
  Eigen::MatrixXd a(12, 2);
  a.col(0) = shard.inputs.col(0);
  a.col(1).setOnes();
  const Eigen::MatrixXd h = a.transpose() * a / 12.0;
  auto grad = [&](const Eigen::Vector2d& w) -> Eigen::Vector2d {
    return a.transpose() * (a * w - shard.targets) / 12.0;
  };
  const Eigen::Vector2d w(0.3, -0.7);
  const double alpha = 0.1, beta = 0.05;
  const Eigen::Vector2d want =
      w - beta * (Eigen::Matrix2d::Identity() - alpha * h) * grad(w - alpha * grad(w));
  SeededRng rng(3, "step");
  const auto got = PerFedAvgLocalUpdate(spec, ParamVector(Eigen::VectorXd(w)), shard, 1,
                                        alpha, beta, 64, rng, model::HvpBackend::kExact);
  CHECK((got.values() - want).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("Per-FedAvg at alpha 0 equals FedAvg bit for bit") {
  const auto users = Users(3, 120, 2.0, 4);
  const auto spec = ModelSpec::LogisticRegression(4, 2);
  SeededRng a(5, "x"), b(5, "x");
  const auto w0 = ParamVector::Zeros(spec.param_dim());
  const auto p = PerFedAvgLocalUpdate(spec, w0, users[0].train, 5, 0.0, 0.2, 16, a);
  const auto f = FedAvgLocalUpdate(spec, w0, users[0].train, 5, 0.2, 16, b);
  CHECK(p == f);
  CHECK(a.counter() == b.counter());
}

TEST_CASE("ServerAggregate averages the summed deltas") {
  const ParamVector w{1.0, 2.0};
  const ParamVector sum{3.0, -6.0};
  CHECK(ServerAggregate(w, sum, 3) == ParamVector{2.0, 0.0});
  CHECK_THROWS_AS(ServerAggregate(w, sum, 0), ArgumentError);
  CHECK_THROWS_AS(ServerAggregate(w, ParamVector{1.0}, 1), DimensionError);
}

TEST_CASE("Convex quadratic with full batches: loss strictly decreases") {
  auto p = data::HeterogeneityProfile::Uniform(3, 50, data::Task::kRegression, 1.0, 3);
  const auto users = data::MakeUsers(p, 6);
  auto c = SmallConfig(Algorithm::kFedAvg);
  c.global_epochs = 10;
  c.batch_size = 1000;
  c.beta = 0.01;
  const auto h = RunTraining(c, ModelSpec::LinearRegression(3), users);
  for (std::size_t k = 1; k < h.epochs.size(); ++k) {
    double prev = 0, cur = 0;
    for (double l : h.epochs[k - 1].server_train_loss) prev += l;
    for (double l : h.epochs[k].server_train_loss) cur += l;
    CHECK(cur < prev);
  }
}

TEST_CASE("Config validation") {
  ExperimentConfig c;
  c.users = 2;
  CHECK_THROWS_AS(c.Validate(), ProtocolError);
  c.cipher = CipherKind::kNull;
  CHECK_THROWS_AS(c.Validate(), ProtocolError);
  c.algorithm = Algorithm::kFedAvg;
  CHECK_NOTHROW(c.Validate());
  c.beta = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig{};
  c.paillier_bits = 512;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig{};
  c.mask_sigma = 50.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = ExperimentConfig{};
  c.global_epochs = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("RunTraining records every algorithm") {
  const auto users = Users(3, 60, 3.0, 7);
  const auto spec = ModelSpec::LogisticRegression(4, 2);
  for (auto a : {Algorithm::kPppml, Algorithm::kFedAvg, Algorithm::kLocalOnly,
                 Algorithm::kCentralized}) {
    const auto h = RunTraining(SmallConfig(a), spec, users);
    CHECK(h.epochs.size() == 4);
    CHECK(h.users.size() == 3);
    CHECK(h.epochs[0].local_train_loss.size() == 3);
    CHECK(h.epochs[0].server_model.dim() == (a == Algorithm::kLocalOnly ? 0 : spec.param_dim()));
    const bool federated = a == Algorithm::kPppml || a == Algorithm::kFedAvg;
    CHECK(h.trace.size() == (federated ? 4u : 0u));
    CHECK(h.users[0].adapted_model.has_value() == (a == Algorithm::kPppml));
    CHECK(h.users[0].final_test.accuracy.has_value());
    if (federated) {
      CHECK(h.trace[0].uploads.size() == 3);
      CHECK(h.trace[0].server_weights == ParamVector::Zeros(spec.param_dim()));
    }
  }
}

TEST_CASE("Server update equals the plain mean of uploaded deltas") {
  const auto users = Users(3, 60, 3.0, 8);
  const auto h = RunTraining(SmallConfig(Algorithm::kFedAvg),
                             ModelSpec::LogisticRegression(4, 2), users);
  for (std::size_t k = 0; k < h.trace.size(); ++k) {
    ParamVector sum = ParamVector::Zeros(h.trace[k].server_weights.dim());
    for (const auto& u : h.trace[k].uploads) sum += u.delta;
    const ParamVector want = h.trace[k].server_weights + sum / 3.0;
    CHECK((want - h.epochs[k].server_model).NormInf() <= 1e-15);
  }
}

TEST_CASE("Results do not depend on the worker count") {
  const auto users = Users(4, 80, 3.0, 9);
  auto c = SmallConfig(Algorithm::kPppml);
  c.users = 4;
  const auto spec = ModelSpec::LogisticRegression(4, 2);
  const auto one = RunTraining(c, spec, users);
  c.workers = 4;
  const auto many = RunTraining(c, spec, users);
  for (std::size_t k = 0; k < one.epochs.size(); ++k) {
    CHECK(one.epochs[k].server_model == many.epochs[k].server_model);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one.users[i].deployed_model == many.users[i].deployed_model);
  }
}

TEST_CASE("Paillier and null ciphers give the same trajectory") {
  const auto users = Users(3, 60, 3.0, 10);
  const auto spec = ModelSpec::LogisticRegression(4, 2);
  auto c = SmallConfig(Algorithm::kPppml);
  c.global_epochs = 2;
  const auto plain = RunTraining(c, spec, users);
  c.cipher = CipherKind::kPaillier;
  const auto enc = RunTraining(c, spec, users);
  REQUIRE(enc.keys.has_value());
  CHECK(enc.trace[0].ring.has_value());
  CHECK(enc.trace[0].uploads.empty());
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK((plain.epochs[k].server_model - enc.epochs[k].server_model).NormInf() <= 1e-6);
  }
}

TEST_CASE("Mismatched user data is rejected") {
  const auto users = Users(3, 60, 3.0, 11);
  auto c = SmallConfig(Algorithm::kFedAvg);
  c.users = 4;
  CHECK_THROWS_AS(RunTraining(c, ModelSpec::LogisticRegression(4, 2), users), ConfigError);
  c.users = 3;
  CHECK_THROWS_AS(RunTraining(c, ModelSpec::LogisticRegression(5, 2), users), ConfigError);
}

TEST_CASE("Divergence surfaces as NonFiniteError") {
  auto p = data::HeterogeneityProfile::Uniform(3, 50, data::Task::kRegression, 1.0, 3);
  const auto users = data::MakeUsers(p, 12);
  auto c = SmallConfig(Algorithm::kFedAvg);
  c.beta = 1e6;
  c.global_epochs = 50;
  CHECK_THROWS_AS(RunTraining(c, ModelSpec::LinearRegression(3), users), NonFiniteError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace fedring::engine
