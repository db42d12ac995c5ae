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

#ifndef FEDRING_CIPHER_H_
#define FEDRING_CIPHER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <gmpxx.h>
#include "json.hpp"

#include "fedring/fixed_point.h"
#include "fedring/param_vector.h"
#include "fedring/rng.h"

namespace fedring::csahe {

// Additively homomorphic schemes behind the cipher interface. kNull is the
// identity map on fixed-point encodings (addition modulo the codec modulus)
// and exists to check that encryption never changes an aggregate.
enum class Scheme : std::uint8_t { kNull = 0, kPaillier = 1 };

std::string_view ToString(Scheme scheme);
Scheme ParseScheme(std::string_view s);

struct PublicKey {
  Scheme scheme = Scheme::kNull;
  // Paillier: n = p q with generator n + 1. Null: the plaintext modulus.
  mpz_class n;
  mpz_class n_squared;
  std::uint64_t key_id = 0;
};

struct PrivateKey {
  Scheme scheme = Scheme::kNull;
  mpz_class n;
  mpz_class lambda;  // lcm(p - 1, q - 1)
  mpz_class mu;      // lambda^-1 mod n
  // Prime factors of n; zero when unknown. With them, decryption and
  // encryption by the key holder run modulo p^2 and q^2.
  mpz_class p;
  mpz_class q;
  std::uint64_t key_id = 0;
};

struct AheKeyPair {
  PublicKey public_key;
  PrivateKey private_key;
  FixedPointCodec codec;
};

// Paillier key generation; bits must be 1024, 2048 or 3072. Deterministic
// given the rng state.
AheKeyPair Keygen(int bits, const FixedPointCodec& codec, SeededRng& rng);
AheKeyPair NullKeygen(const FixedPointCodec& codec);

// Single-element primitives on plaintexts in [0, n).
mpz_class Encrypt(const mpz_class& m, const PublicKey& pk, SeededRng& rng);
mpz_class Decrypt(const mpz_class& c, const PrivateKey& sk);
mpz_class AddCiphertexts(const mpz_class& a, const mpz_class& b,
                         const PublicKey& pk);

// One ciphertext per coordinate.
struct CipherVector {
  std::vector<mpz_class> elements;
  std::size_t dim = 0;
  Scheme scheme = Scheme::kNull;
  std::uint64_t key_id = 0;
};

CipherVector EncryptVector(const ParamVector& v, const PublicKey& pk,
                           const FixedPointCodec& codec, SeededRng& rng);
// Same ciphertexts as the public-key version for the same rng state,
// computed with the key holder's factorization.
CipherVector EncryptVector(const ParamVector& v, const AheKeyPair& keys,
                           SeededRng& rng);
// Throws DecryptError when the key does not belong to the ciphertext.
ParamVector DecryptVector(const CipherVector& c, const PrivateKey& sk,
                          const FixedPointCodec& codec);
// Coordinate-wise homomorphic sum. Throws SchemeMismatchError or
// DimensionError on incompatible operands.
CipherVector AddCipher(const CipherVector& a, const CipherVector& b,
                       const PublicKey& pk);
// a - r, computed as a + Enc(-r).
CipherVector SubCipher(const CipherVector& a, const ParamVector& r,
                       const PublicKey& pk, const FixedPointCodec& codec,
                       SeededRng& rng);
CipherVector SubCipher(const CipherVector& a, const ParamVector& r,
                       const AheKeyPair& keys, SeededRng& rng);

// Wire format: scheme (1 byte), key id (8 bytes), dim (4 bytes), then each
// ciphertext as a 4-byte length followed by its big-endian magnitude. All
// integers are big-endian.
std::vector<std::uint8_t> Serialize(const CipherVector& c);
CipherVector Deserialize(std::span<const std::uint8_t> bytes);

std::string ToHex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> FromHex(std::string_view hex);

nlohmann::json ToJson(const PublicKey& pk);
nlohmann::json ToJson(const PrivateKey& sk);
PublicKey PublicKeyFromJson(const nlohmann::json& j);
PrivateKey PrivateKeyFromJson(const nlohmann::json& j);

}  // namespace fedring::csahe

#endif  // FEDRING_CIPHER_H_
