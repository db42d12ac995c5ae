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

#ifndef FEDRING_ADVERSARY_H_
#define FEDRING_ADVERSARY_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fedring/csahe.h"
#include "fedring/engine.h"
#include "fedring/model.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"
#include "json.hpp"

namespace fedring::adversary {

enum class Provenance {
  kFedAvgUserUpload,
  kCsaheIntermediateDecrypted,
  kCsaheFinalAggregate,
};

std::string_view ToString(Provenance p);

// What an attacker knows besides the intercepted vector.
struct AttackContext {
  model::ModelSpec model_spec;
  ParamVector server_weights;
  // observed = update_scale * gradient. A single local SGD step of rate
  // beta uploads w_new - w_old = -beta * gradient.
  double update_scale = 1.0;
  // Private samples used only to score the reconstruction.
  std::vector<Eigen::VectorXd> candidates;
};

struct AttackTarget {
  ParamVector observed_gradient;
  Provenance provenance = Provenance::kFedAvgUserUpload;
  AttackContext context;

  // observed_gradient / update_scale
  ParamVector ImpliedGradient() const;
};

// A ring message seen on the wire without any key material.
struct CiphertextObservation {
  std::size_t hop = 0;
  int sender = 0;
  int receiver = 0;
  csahe::Scheme scheme = csahe::Scheme::kNull;
  std::size_t dim = 0;
  std::vector<std::uint8_t> bytes;
};

using Observation = std::variant<AttackTarget, CiphertextObservation>;

inline bool PlaintextAvailable(const Observation& o) {
  return std::holds_alternative<AttackTarget>(o);
}

struct AttackOptions {
  int iterations = 5000;
  double eta = 0.1;
  int max_halvings = 20;
  // Record the dummy data every this many iterations; 0 disables.
  int snapshot_every = 0;
};

struct Snapshot {
  int iteration = 0;
  Eigen::VectorXd data;
};

struct AttackResult {
  Eigen::VectorXd dummy_data;
  int dummy_label = 0;
  bool label_extracted = false;
  std::vector<double> loss_curve;
  // Against the closest candidate; NaN without candidates.
  double reconstruction_mse = 0.0;
  int best_candidate = -1;
  std::vector<Snapshot> snapshots;
};

// iDLG label rule. For a single-sample cross-entropy gradient every
// final-layer row is the shared activation scaled by (p_c - y_c), so exactly
// one row, the true class, points against it. The bias block is the
// coefficient on the constant activation, whose sign gives the answer.
//
// Throws AmbiguityError if the rows are not all parallel to one activation
// (multi-sample batch), if no unique negative row exists, or on a zero
// gradient. Throws ArgumentError for non-classifiers.
int ExtractLabel(const ParamVector& grad, const model::ModelSpec& spec);

// Gradient-matching reconstruction: starting from x' ~ N(0, 1), descend
// L_G = |grad(x', label) - observed|^2 with step eta, halving the step (up
// to max_halvings times) whenever it would raise L_G. Stops early at
// L_G == 0 or when no halving makes progress.
AttackResult IdlgAttack(const AttackTarget& target, const AttackOptions& options,
                        SeededRng& rng,
                        std::optional<Eigen::VectorXd> initial_dummy = {});

// Throws TypeError for ciphertext-only observations.
AttackResult IdlgAttack(const Observation& observation,
                        const AttackOptions& options, SeededRng& rng);

// L_G for a given dummy input and label.
double GradientMatchLoss(const AttackTarget& target, const Eigen::VectorXd& x,
                         int label);

// Type I vantage on plaintext FedAvg traffic: hop indexes the uploads.
Observation Intercept(std::span<const engine::Upload> uploads, std::size_t hop,
                      const AttackContext& context);

// Type I vantage on the ring: only ciphertext is visible.
Observation Intercept(const csahe::RingState& ring, std::size_t hop);

// Type II vantage with a leaked private key: decrypts ring message `hop`,
// which holds the initiator's masked gradient plus the first `hop`
// non-initiator gradients. Throws DecryptError for the wrong key.
AttackTarget HbcView(const csahe::RingState& ring, std::size_t hop,
                     const csahe::PrivateKey& leaked_sk,
                     const FixedPointCodec& codec, const AttackContext& context);

// Aggregate relayed from the initiator to the server.
AttackTarget AggregateView(const ParamVector& aggregate,
                           const AttackContext& context);

nlohmann::json ToJson(const AttackResult& result);

// Writes dummy data as an 8-bit PGM, min-max scaled. Input dimension must be
// a perfect square.
void WritePgm(const std::filesystem::path& path, const Eigen::VectorXd& data);
bool IsPerfectSquare(std::size_t n);

}  // namespace fedring::adversary

#endif  // FEDRING_ADVERSARY_H_
