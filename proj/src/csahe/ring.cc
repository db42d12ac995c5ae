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

#include <algorithm>
#include <string>

#include "fedring/csahe.h"
#include "fedring/errors.h"

namespace fedring::csahe {
namespace {

void CheckGradients(std::span<const ParamVector> gradients) {
  if (gradients.size() < 3) {
    throw ProtocolError(
        "cyclic secure aggregation needs at least 3 users; with 2 the "
        "initiator recovers the other user's exact gradient (got " +
        std::to_string(gradients.size()) + ")");
  }
  for (const auto& g : gradients) {
    if (g.dim() != gradients.front().dim()) {
      throw DimensionError("all gradients in the ring must share a dimension");
    }
  }
}

}  // namespace

double DefaultMaskSigma(std::span<const ParamVector> gradients) {
  double max_abs = 0.0;
  for (const auto& g : gradients) max_abs = std::max(max_abs, g.NormInf());
  return std::max(150.0, 100.0 * max_abs);
}

MaskVector MakeMask(std::size_t dim, double sigma, SeededRng& rng,
                    bool enforce_floor) {
  if (enforce_floor && !(sigma > kMaskSigmaFloor)) {
    throw ArgumentError("mask sigma must exceed " +
                        std::to_string(kMaskSigmaFloor) + ", got " +
                        std::to_string(sigma));
  }
  return {GaussianVector(dim, 0.0, sigma, rng), sigma};
}

RingResult RingAggregate(std::span<const ParamVector> gradients,
                         const AheKeyPair& keys,
                         std::optional<double> mask_sigma, SeededRng& rng) {
  CheckGradients(gradients);
  const auto n = static_cast<std::uint64_t>(gradients.size());
  const int initiator = static_cast<int>(rng.UniformInt(n));
  const double sigma = mask_sigma.value_or(DefaultMaskSigma(gradients));
  const MaskVector mask = MakeMask(gradients.front().dim(), sigma, rng);
  return RingAggregateWithMask(gradients, keys, initiator, mask.values, rng);
}

RingResult RingAggregateWithMask(std::span<const ParamVector> gradients,
                                 const AheKeyPair& keys, int initiator,
                                 const ParamVector& mask, SeededRng& rng) {
  CheckGradients(gradients);
  const int n = static_cast<int>(gradients.size());
  if (initiator < 0 || initiator >= n) {
    throw IndexError("initiator index out of range");
  }
  if (mask.dim() != gradients.front().dim()) {
    throw DimensionError("mask dimension differs from the gradients");
  }
  const PublicKey& pk = keys.public_key;
  const FixedPointCodec& codec = keys.codec;

  double max_abs = mask.NormInf();
  for (const auto& g : gradients) max_abs = std::max(max_abs, g.NormInf());
  // n gradients, the mask and its negation all pass through the codec.
  codec.CheckSumHeadroom(gradients.size() + 2, max_abs);

  RingState ring;
  ring.initiator = initiator;
  for (int k = 0; k < n; ++k) ring.order.push_back((initiator + k) % n);

  // The initiator masks its own gradient before anything leaves it.
  CipherVector running =
      EncryptVector(gradients[initiator] + mask, keys, rng);
  ring.trace.push_back({initiator, ring.order[1 % n], running});
  for (int k = 1; k < n; ++k) {
    const int user = ring.order[k];
    // Encryption-summation: encrypt own gradient, add to what arrived.
    running = AddCipher(running, EncryptVector(gradients[user], pk, codec, rng), pk);
    ring.trace.push_back({user, ring.order[(k + 1) % n], running});
  }

  // Back at the initiator: strip the mask, then decrypt.
  const CipherVector unmasked = SubCipher(running, mask, keys, rng);
  return {DecryptVector(unmasked, keys.private_key, codec), std::move(ring)};
}

nlohmann::json ToJson(const RingState& ring) {
  nlohmann::json messages = nlohmann::json::array();
  for (std::size_t hop = 0; hop < ring.trace.size(); ++hop) {
    const auto& m = ring.trace[hop];
    messages.push_back({{"hop", hop},
                        {"sender", m.sender},
                        {"receiver", m.receiver},
                        {"ciphertext", ToHex(Serialize(m.payload))}});
  }
  return {{"initiator", ring.initiator},
          {"order", ring.order},
          {"messages", std::move(messages)}};
}

RingState RingStateFromJson(const nlohmann::json& j) {
  RingState ring;
  ring.initiator = j.at("initiator").get<int>();
  ring.order = j.at("order").get<std::vector<int>>();
  for (const auto& m : j.at("messages")) {
    const auto bytes = FromHex(m.at("ciphertext").get<std::string>());
    ring.trace.push_back({m.at("sender").get<int>(), m.at("receiver").get<int>(),
                          Deserialize(bytes)});
  }
  if (ring.order.empty() || ring.trace.size() != ring.order.size()) {
    throw ArgumentError("ring trace must have one message per user");
  }
  return ring;
}

}  // namespace fedring::csahe
