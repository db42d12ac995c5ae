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

#include "fedring/engine.h"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>

#include "fedring/errors.h"

namespace fedring::engine {
namespace {

using model::ModelSpec;

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes
// only its own slot, so results are independent of scheduling.
void ForEachUser(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  {
    std::vector<std::jthread> pool;
    const int threads = std::min(workers, n);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = t; i < n; i += threads) {
          try {
            fn(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

TestMetrics Evaluate(const ModelSpec& spec, const ParamVector& w,
                     const DatasetShard& test) {
  TestMetrics m;
  if (test.empty()) return m;
  m.loss = model::Loss(spec, w, test);
  if (spec.is_classifier()) m.accuracy = model::Accuracy(spec, w, test);
  return m;
}

void CheckStepArgs(int steps, double rate, int batch_size, const char* what) {
  if (steps < 0) throw ArgumentError(std::string(what) + " needs steps >= 0");
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw ArgumentError(std::string(what) + " needs a finite rate >= 0");
  }
  if (batch_size < 1) throw ArgumentError(std::string(what) + " needs batch_size >= 1");
}

}  // namespace

std::string_view ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kPppml: return "pppml";
    case Algorithm::kFedAvg: return "fedavg";
    case Algorithm::kLocalOnly: return "local-only";
    case Algorithm::kCentralized: return "centralized";
  }
  return "?";
}

std::string_view ToString(CipherKind c) {
  return c == CipherKind::kPaillier ? "paillier" : "null";
}

Algorithm ParseAlgorithm(std::string_view s) {
  if (s == "pppml") return Algorithm::kPppml;
  if (s == "fedavg") return Algorithm::kFedAvg;
  if (s == "local-only") return Algorithm::kLocalOnly;
  if (s == "centralized") return Algorithm::kCentralized;
  throw ConfigError("unknown algorithm '" + std::string(s) +
                    "' (expected pppml, fedavg, local-only or centralized)");
}

CipherKind ParseCipherKind(std::string_view s) {
  if (s == "null") return CipherKind::kNull;
  if (s == "paillier") return CipherKind::kPaillier;
  throw ConfigError("unknown cipher '" + std::string(s) +
                    "' (expected null or paillier)");
}

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(global_epochs >= 1, "global_epochs must be >= 1");
  require(local_epochs >= 1, "local_epochs must be >= 1");
  require(adapt_epochs >= 1, "adapt_epochs must be >= 1");
  require(users >= 1, "users must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be finite and >= 0");
  require(beta > 0.0 && std::isfinite(beta), "beta must be finite and > 0");
  require(workers >= 1, "workers must be >= 1");
  if (mask_sigma) {
    require(*mask_sigma > csahe::kMaskSigmaFloor,
            "mask_sigma must exceed " + std::to_string(csahe::kMaskSigmaFloor));
  }
  if (algorithm == Algorithm::kPppml && cipher == CipherKind::kPaillier) {
    require(paillier_bits == 1024 || paillier_bits == 2048 || paillier_bits == 3072,
            "paillier_bits must be 1024, 2048 or 3072");
  }
  if (algorithm == Algorithm::kPppml && users < 3) {
    throw ProtocolError(
        "pppml requires at least 3 users (N >= 3); with 2 users the ring is "
        "vulnerable because the initiator can recover the other user's exact "
        "gradient");
  }
  try {
    codec.Validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

std::array<std::vector<std::size_t>, 3> DrawBatches(std::size_t shard_size,
                                                    std::size_t batch_size,
                                                    SeededRng& rng) {
  if (shard_size == 0) throw DimensionError("cannot draw batches from an empty shard");
  std::array<std::vector<std::size_t>, 3> batches;
  if (shard_size >= 3 * batch_size) {
    const auto perm = rng.Permutation(shard_size);
    for (std::size_t b = 0; b < 3; ++b) {
      batches[b].assign(perm.begin() + static_cast<std::ptrdiff_t>(b * batch_size),
                        perm.begin() + static_cast<std::ptrdiff_t>((b + 1) * batch_size));
    }
    return batches;
  }
  for (auto& batch : batches) {
    auto perm = rng.Permutation(shard_size);
    perm.resize(std::min(batch_size, shard_size));
    batch = std::move(perm);
  }
  return batches;
}

ParamVector PerFedAvgLocalUpdate(const ModelSpec& spec, const ParamVector& w_k,
                                 const DatasetShard& shard, int tau,
                                 double alpha, double beta, int batch_size,
                                 SeededRng& rng, model::HvpBackend hvp) {
  CheckStepArgs(tau, beta, batch_size, "Per-FedAvg update");
  if (!(alpha >= 0.0)) throw ArgumentError("alpha must be >= 0");
  ParamVector w = w_k;
  for (int t = 0; t < tau; ++t) {
    const auto batches = DrawBatches(shard.size(), static_cast<std::size_t>(batch_size), rng);
    const DatasetShard d1 = shard.Subset(batches[1]);
    ParamVector direction;
    if (alpha == 0.0) {
      // w~ = w and the Hessian term vanishes.
      direction = model::Grad(spec, w, d1);
    } else {
      const DatasetShard d0 = shard.Subset(batches[0]);
      const DatasetShard d2 = shard.Subset(batches[2]);
      const ParamVector w_tilde = w - alpha * model::Grad(spec, w, d0);
      const ParamVector outer = model::Grad(spec, w_tilde, d1);
      direction = outer - alpha * model::Hvp(spec, w, outer, d2, hvp);
    }
    w -= beta * direction;
  }
  return w;
}

ParamVector FedAvgLocalUpdate(const ModelSpec& spec, const ParamVector& w_k,
                              const DatasetShard& shard, int tau, double beta,
                              int batch_size, SeededRng& rng) {
  CheckStepArgs(tau, beta, batch_size, "FedAvg update");
  ParamVector w = w_k;
  for (int t = 0; t < tau; ++t) {
    const auto batches = DrawBatches(shard.size(), static_cast<std::size_t>(batch_size), rng);
    w -= beta * model::Grad(spec, w, shard.Subset(batches[1]));
  }
  return w;
}

ParamVector ServerAggregate(const ParamVector& w_k, const ParamVector& delta_csa,
                            int n) {
  if (n < 1) throw ArgumentError("server aggregation needs n >= 1");
  if (delta_csa.dim() != w_k.dim()) {
    throw DimensionError("aggregated delta does not match the server model");
  }
  return w_k + delta_csa / static_cast<double>(n);
}

ParamVector Adapt(const ModelSpec& spec, const ParamVector& meta_model,
                  const DatasetShard& shard, int gamma, double beta,
                  int batch_size, SeededRng& rng) {
  CheckStepArgs(gamma, beta, batch_size, "adaptation");
  ParamVector w = meta_model;
  const auto b = static_cast<std::size_t>(batch_size);
  std::vector<std::size_t> perm;
  std::size_t cursor = 0;
  for (int t = 0; t < gamma; ++t) {
    // Walk a shuffled pass, reshuffling once exhausted.
    if (perm.empty() || cursor + std::min(b, shard.size()) > perm.size()) {
      perm = rng.Permutation(shard.size());
      cursor = 0;
    }
    const std::size_t take = std::min(b, shard.size());
    std::span<const std::size_t> rows(perm.data() + cursor, take);
    cursor += take;
    w -= beta * model::Grad(spec, w, shard.Subset(rows));
  }
  return w;
}

TrainingHistory RunTraining(const ExperimentConfig& config, const ModelSpec& spec,
                            std::span<const UserData> users) {
  config.Validate();
  spec.Validate();
  if (static_cast<int>(users.size()) != config.users) {
    throw ConfigError("expected " + std::to_string(config.users) +
                      " user shards, got " + std::to_string(users.size()));
  }
  for (const auto& u : users) {
    if (u.train.empty()) throw ConfigError("user '" + u.train.user_id + "' has no training data");
    if (u.train.feature_dim() != static_cast<std::size_t>(spec.input_dim())) {
      throw ConfigError("user '" + u.train.user_id +
                        "' feature dimension does not match the model");
    }
  }

  const int n = config.users;
  const SeededRng root(config.seed, "experiment");
  SeededRng init_rng = root.Derive("server/init");
  const ParamVector w0 = model::InitialWeights(spec, init_rng);

  std::vector<SeededRng> local_rngs;
  std::vector<SeededRng> adapt_rngs;
  for (int i = 0; i < n; ++i) {
    local_rngs.push_back(root.Derive("user/" + std::to_string(i) + "/local"));
    adapt_rngs.push_back(root.Derive("user/" + std::to_string(i) + "/adapt"));
  }

  TrainingHistory history;
  const bool encrypted = config.algorithm == Algorithm::kPppml &&
                         config.cipher == CipherKind::kPaillier;
  if (encrypted) {
    SeededRng key_rng = root.Derive("csahe/keygen");
    history.keys = csahe::Keygen(config.paillier_bits, config.codec, key_rng);
  }

  std::vector<DatasetShard> train_shards;
  for (const auto& u : users) train_shards.push_back(u.train);
  const DatasetShard pooled =
      config.algorithm == Algorithm::kCentralized
          ? Concatenate(train_shards, "pooled")
          : DatasetShard();
  SeededRng central_rng = root.Derive("centralized/local");

  ParamVector server = w0;
  std::vector<ParamVector> local_models(static_cast<std::size_t>(n), w0);

  for (int k = 0; k < config.global_epochs; ++k) {
    const auto started = std::chrono::steady_clock::now();
    EpochRecord record;
    record.epoch = k;
    RoundTrace round;
    round.epoch = k;
    round.server_weights = server;

    switch (config.algorithm) {
      case Algorithm::kPppml:
      case Algorithm::kFedAvg: {
        ForEachUser(n, config.workers, [&](int i) {
          auto& rng = local_rngs[static_cast<std::size_t>(i)];
          local_models[static_cast<std::size_t>(i)] =
              config.algorithm == Algorithm::kPppml
                  ? PerFedAvgLocalUpdate(spec, server, users[i].train,
                                         config.local_epochs, config.alpha,
                                         config.beta, config.batch_size, rng,
                                         config.hvp)
                  : FedAvgLocalUpdate(spec, server, users[i].train,
                                      config.local_epochs, config.beta,
                                      config.batch_size, rng);
        });
        // Each user's change relative to the broadcast model.
        std::vector<ParamVector> deltas;
        for (int i = 0; i < n; ++i) {
          deltas.push_back(local_models[static_cast<std::size_t>(i)] - server);
        }
        ParamVector sum;
        if (encrypted) {
          SeededRng ring_rng = root.Derive("csahe/round/" + std::to_string(k));
          auto result = csahe::RingAggregate(deltas, *history.keys,
                                             config.mask_sigma, ring_rng);
          sum = std::move(result.delta_csa);
          if (config.record_trace) round.ring = std::move(result.ring);
        } else {
          sum = ParamVector::Zeros(server.dim());
          for (const auto& d : deltas) sum += d;
          if (config.record_trace) {
            for (int i = 0; i < n; ++i) round.uploads.push_back({i, deltas[static_cast<std::size_t>(i)]});
          }
        }
        round.aggregate = sum;
        server = ServerAggregate(server, sum, n);
        break;
      }
      case Algorithm::kLocalOnly:
        ForEachUser(n, config.workers, [&](int i) {
          auto& w = local_models[static_cast<std::size_t>(i)];
          w = FedAvgLocalUpdate(spec, w, users[i].train, config.local_epochs,
                                config.beta, config.batch_size,
                                local_rngs[static_cast<std::size_t>(i)]);
        });
        break;
      case Algorithm::kCentralized:
        server = FedAvgLocalUpdate(spec, server, pooled, config.local_epochs,
                                   config.beta, config.batch_size, central_rng);
        break;
    }

    const bool has_server = config.algorithm != Algorithm::kLocalOnly;
    if (has_server) record.server_model = server;
    for (int i = 0; i < n; ++i) {
      const auto& train = users[i].train;
      const ParamVector& own = config.algorithm == Algorithm::kCentralized
                                   ? server
                                   : local_models[static_cast<std::size_t>(i)];
      record.local_train_loss.push_back(model::Loss(spec, own, train));
      record.server_train_loss.push_back(
          model::Loss(spec, has_server ? server : own, train));
    }
    record.wall_seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - started)
                              .count();
    history.epochs.push_back(std::move(record));
    if (config.record_trace && (config.algorithm == Algorithm::kPppml ||
                                config.algorithm == Algorithm::kFedAvg)) {
      history.trace.push_back(std::move(round));
    }
  }

  // Broadcast the final server model and adapt it locally.
  const bool adapt = config.algorithm == Algorithm::kPppml ||
                     (config.adapt_baselines &&
                      config.algorithm != Algorithm::kLocalOnly);
  history.users.resize(static_cast<std::size_t>(n));
  ForEachUser(n, config.workers, [&](int i) {
    auto& out = history.users[static_cast<std::size_t>(i)];
    const ParamVector& base = config.algorithm == Algorithm::kLocalOnly
                                  ? local_models[static_cast<std::size_t>(i)]
                                  : server;
    out.server_test = Evaluate(spec, base, users[i].test);
    out.deployed_model = base;
    if (adapt) {
      out.adapted_model = Adapt(spec, base, users[i].train, config.adapt_epochs,
                                config.beta, config.batch_size,
                                adapt_rngs[static_cast<std::size_t>(i)]);
      out.deployed_model = *out.adapted_model;
    }
    out.final_test = Evaluate(spec, out.deployed_model, users[i].test);
  });
  return history;
}

}  // namespace fedring::engine
