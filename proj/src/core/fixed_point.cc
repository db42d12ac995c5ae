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

#include "fedring/fixed_point.h"

#include <cmath>
#include <string>

#include "fedring/errors.h"

namespace fedring {

void FixedPointCodec::Validate() const {
  if (scale_bits < 0 || scale_bits > 256) {
    throw ArgumentError("scale_bits must be in [0, 256]");
  }
  if (plaintext_modulus_bits <= scale_bits + 1 ||
      plaintext_modulus_bits > 1024) {
    throw ArgumentError(
        "plaintext_modulus_bits must exceed scale_bits + 1 and be <= 1024");
  }
}

mpz_class FixedPointCodec::Modulus() const {
  mpz_class m = 1;
  m <<= plaintext_modulus_bits;
  return m;
}

double FixedPointCodec::MaxMagnitude() const {
  return std::ldexp(1.0, plaintext_modulus_bits - scale_bits - 1);
}

double FixedPointCodec::Resolution() const {
  return std::ldexp(1.0, -scale_bits);
}

void FixedPointCodec::CheckSumHeadroom(std::size_t summands,
                                       double max_abs) const {
  // N * max|x| * 2^f < 2^(bits - 1)
  const double lhs = static_cast<double>(summands) * std::abs(max_abs);
  if (!std::isfinite(lhs) || lhs >= MaxMagnitude()) {
    throw OverflowError("fixed-point headroom exceeded: " +
                        std::to_string(summands) + " summands of magnitude " +
                        std::to_string(max_abs) + " need more than " +
                        std::to_string(plaintext_modulus_bits) +
                        " plaintext bits at scale " +
                        std::to_string(scale_bits));
  }
}

mpz_class EncodeFixed(double x, const FixedPointCodec& codec) {
  if (!std::isfinite(x)) throw OverflowError("cannot encode a non-finite value");
  // Scaling by a power of two is exact, and std::round rounds half away
  // from zero.
  const double scaled = std::round(std::ldexp(x, codec.scale_bits));
  if (std::abs(scaled) >= std::ldexp(1.0, codec.plaintext_modulus_bits - 1)) {
    throw OverflowError("value " + std::to_string(x) +
                        " exceeds the fixed-point range");
  }
  mpz_class n(scaled);
  if (n < 0) n += codec.Modulus();
  return n;
}

double DecodeFixed(const mpz_class& n, const FixedPointCodec& codec) {
  const mpz_class modulus = codec.Modulus();
  mpz_class r = n % modulus;
  if (r < 0) r += modulus;
  mpz_class half = modulus >> 1;
  if (r >= half) r -= modulus;
  // mpz_get_d truncates beyond 53 bits; that error is far below 2^-f for
  // the magnitudes the codec accepts.
  return std::ldexp(r.get_d(), -codec.scale_bits);
}

ParamVector GaussianVector(std::size_t dim, double mean, double sigma,
                           SeededRng& rng) {
  if (dim < 1) throw ArgumentError("gaussian vector needs dim >= 1");
  if (!(sigma > 0.0)) throw ArgumentError("gaussian sigma must be positive");
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.Normal(mean, sigma);
  return ParamVector(std::move(v));
}

}  // namespace fedring
