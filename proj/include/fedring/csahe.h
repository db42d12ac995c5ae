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

#ifndef FEDRING_CSAHE_H_
#define FEDRING_CSAHE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "fedring/cipher.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"

namespace fedring::csahe {

// One hop of the ring.
struct Message {
  int sender = 0;
  int receiver = 0;
  CipherVector payload;
};

// The loop for one aggregation: order[0] is the initiator and order[k + 1]
// follows order[k]. trace[k] is the message order[k] sends to its successor,
// so trace.back() closes the loop at the initiator.
struct RingState {
  std::vector<int> order;
  int initiator = 0;
  std::vector<Message> trace;
};

struct MaskVector {
  ParamVector values;
  double sigma = 0.0;
};

// Smallest mask deviation accepted unless the floor is explicitly waived.
inline constexpr double kMaskSigmaFloor = 100.0;

// max(150, 100 * max_i |g_i|_inf)
double DefaultMaskSigma(std::span<const ParamVector> gradients);

// Gaussian N(0, sigma^2) mask. Throws ArgumentError when sigma <= 100 and
// enforce_floor is set.
MaskVector MakeMask(std::size_t dim, double sigma, SeededRng& rng,
                    bool enforce_floor = true);

struct RingResult {
  ParamVector delta_csa;  // decrypted sum of all gradients
  RingState ring;
};

// Cyclic secure aggregation. Picks a uniform initiator, who masks its own
// gradient with R ~ N(0, sigma^2) and encrypts it; every other user adds its
// encrypted gradient in ascending-id order after the initiator; the
// initiator subtracts R homomorphically and decrypts. A missing mask_sigma
// means DefaultMaskSigma.
//
// Throws ProtocolError for fewer than three users, DimensionError for
// ragged gradients and OverflowError when the codec lacks headroom.
RingResult RingAggregate(std::span<const ParamVector> gradients,
                         const AheKeyPair& keys,
                         std::optional<double> mask_sigma, SeededRng& rng);

// The protocol with a caller-chosen initiator and mask; RingAggregate draws
// both and delegates here.
RingResult RingAggregateWithMask(std::span<const ParamVector> gradients,
                                 const AheKeyPair& keys, int initiator,
                                 const ParamVector& mask, SeededRng& rng);

nlohmann::json ToJson(const RingState& ring);
RingState RingStateFromJson(const nlohmann::json& j);

}  // namespace fedring::csahe

#endif  // FEDRING_CSAHE_H_
