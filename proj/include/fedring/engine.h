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

#ifndef FEDRING_ENGINE_H_
#define FEDRING_ENGINE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedring/csahe.h"
#include "fedring/dataset.h"
#include "fedring/model.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"

namespace fedring::engine {

enum class Algorithm { kPppml, kFedAvg, kLocalOnly, kCentralized };
enum class CipherKind { kNull, kPaillier };

std::string_view ToString(Algorithm a);
std::string_view ToString(CipherKind c);
Algorithm ParseAlgorithm(std::string_view s);
CipherKind ParseCipherKind(std::string_view s);

struct ExperimentConfig {
  int global_epochs = 20;  // K
  int local_epochs = 10;   // tau
  int adapt_epochs = 5;    // gamma
  double alpha = 1e-4;     // inner (meta) step size
  double beta = 1e-4;      // local learning rate, also used for adaptation
  int users = 3;
  int batch_size = 64;
  Algorithm algorithm = Algorithm::kPppml;
  // kNull aggregates plaintext deltas directly; kPaillier runs the
  // encrypted ring. Only meaningful for pppml.
  CipherKind cipher = CipherKind::kPaillier;
  std::optional<double> mask_sigma;
  int paillier_bits = 1024;
  FixedPointCodec codec;
  model::HvpBackend hvp = model::HvpBackend::kFiniteDifference;
  // Run the final adaptation for baselines too.
  bool adapt_baselines = false;
  // Keep per-round uploads / ring messages in the history.
  bool record_trace = true;
  // Threads for per-user local updates; results do not depend on it.
  int workers = 1;
  std::uint64_t seed = 0;

  // Throws ConfigError, or ProtocolError for pppml below 3 users.
  void Validate() const;
};

// One local iteration draws three batches: D, D' and D''. With enough data
// they are disjoint slices of a fresh permutation; otherwise each is drawn
// independently (the whole shard when batch_size >= shard size).
std::array<std::vector<std::size_t>, 3> DrawBatches(std::size_t shard_size,
                                                    std::size_t batch_size,
                                                    SeededRng& rng);

// tau Per-FedAvg iterations:
//   w~ = w - alpha grad(w, D)
//   w  = w - beta (I - alpha H(w, D'')) grad(w~, D')
ParamVector PerFedAvgLocalUpdate(const model::ModelSpec& spec,
                                 const ParamVector& w_k,
                                 const DatasetShard& shard, int tau,
                                 double alpha, double beta, int batch_size,
                                 SeededRng& rng,
                                 model::HvpBackend hvp =
                                     model::HvpBackend::kFiniteDifference);

// tau mini-batch SGD steps. Consumes randomness exactly like
// PerFedAvgLocalUpdate and steps on D', so it equals that update at alpha 0.
ParamVector FedAvgLocalUpdate(const model::ModelSpec& spec,
                              const ParamVector& w_k, const DatasetShard& shard,
                              int tau, double beta, int batch_size,
                              SeededRng& rng);

// w_k + delta_csa / n, where delta_csa is the sum of the users' deltas.
ParamVector ServerAggregate(const ParamVector& w_k, const ParamVector& delta_csa,
                            int n);

// gamma SGD steps from the meta-model on the user's own data.
ParamVector Adapt(const model::ModelSpec& spec, const ParamVector& meta_model,
                  const DatasetShard& shard, int gamma, double beta,
                  int batch_size, SeededRng& rng);

struct Upload {
  int user = 0;
  ParamVector delta;
};

// What crossed the wire in one global epoch.
struct RoundTrace {
  int epoch = 0;
  ParamVector server_weights;  // w_k broadcast at the start of the round
  std::vector<Upload> uploads;           // plaintext transports
  std::optional<csahe::RingState> ring;  // encrypted ring
  std::optional<ParamVector> aggregate;  // what reached the server
};

struct EpochRecord {
  int epoch = 0;
  ParamVector server_model;  // w_{k+1}; empty for local-only
  std::vector<double> local_train_loss;   // each user's model after the round
  std::vector<double> server_train_loss;  // w_{k+1} on each user's train shard
  double wall_seconds = 0.0;
};

struct TestMetrics {
  std::optional<double> loss;
  std::optional<double> accuracy;
};

struct UserOutcome {
  std::optional<ParamVector> adapted_model;
  ParamVector deployed_model;  // adapted, else server, else own model
  TestMetrics server_test;     // global model (own model for local-only)
  TestMetrics final_test;      // deployed model
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::vector<UserOutcome> users;
  std::vector<RoundTrace> trace;
  std::optional<csahe::AheKeyPair> keys;
};

// Runs the configured algorithm end to end. users.size() must equal
// config.users; centralized training pools every user's train shard.
TrainingHistory RunTraining(const ExperimentConfig& config,
                            const model::ModelSpec& spec,
                            std::span<const UserData> users);

}  // namespace fedring::engine

#endif  // FEDRING_ENGINE_H_
