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

#ifndef FEDRING_FIXED_POINT_H_
#define FEDRING_FIXED_POINT_H_

#include <cstddef>

#include <gmpxx.h>

#include "fedring/param_vector.h"
#include "fedring/rng.h"

namespace fedring {

// Signed fixed-point encoding of reals into Z_M, M = 2^plaintext_modulus_bits.
// Values at or above M/2 represent negatives, which makes the encoding
// additively homomorphic modulo M.
//
// The defaults (32 fractional bits, 64-bit plaintext space) let 2^20 summands
// of magnitude up to 2^10 be added without wrapping.
struct FixedPointCodec {
  int scale_bits = 32;
  int plaintext_modulus_bits = 64;

  void Validate() const;
  mpz_class Modulus() const;
  // Exclusive bound on |x| accepted by EncodeFixed.
  double MaxMagnitude() const;
  // Per-value quantization bound, 2^-scale_bits.
  double Resolution() const;
  // Throws OverflowError unless `summands` values of magnitude at most
  // `max_abs` can be added without leaving the signed range.
  void CheckSumHeadroom(std::size_t summands, double max_abs) const;
};

// round(x * 2^scale_bits), rounding half away from zero, reduced into [0, M).
// Throws OverflowError when x is not finite or does not fit.
mpz_class EncodeFixed(double x, const FixedPointCodec& codec);

// Inverse of EncodeFixed. Inputs outside [0, M) are first reduced modulo M,
// which is how sums of encodings are read back.
double DecodeFixed(const mpz_class& n, const FixedPointCodec& codec);

// dim i.i.d. draws from N(mean, sigma^2). Throws ArgumentError unless
// dim >= 1 and sigma > 0.
ParamVector GaussianVector(std::size_t dim, double mean, double sigma,
                           SeededRng& rng);

}  // namespace fedring

#endif  // FEDRING_FIXED_POINT_H_
