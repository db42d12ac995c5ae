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

#include "fedring/cipher.h"

#include <string>

#include "fedring/errors.h"

namespace fedring::csahe {
namespace {

mpz_class RandomBits(int bits, SeededRng& rng) {
  mpz_class r = 0;
  for (int have = 0; have < bits; have += 64) {
    r <<= 64;
    const std::uint64_t word = rng.NextU64();
    r += mpz_class(static_cast<unsigned long>(word >> 32)) << 32;
    r += static_cast<unsigned long>(word & 0xffffffffULL);
  }
  const int excess = ((bits + 63) / 64) * 64 - bits;
  return r >> excess;
}

// Uniform in [1, bound).
mpz_class RandomBelow(const mpz_class& bound, SeededRng& rng) {
  const int bits = static_cast<int>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  for (;;) {
    mpz_class r = RandomBits(bits, rng);
    if (r >= 1 && r < bound) return r;
  }
}

mpz_class RandomPrime(int bits, SeededRng& rng) {
  for (;;) {
    mpz_class candidate = RandomBits(bits, rng);
    // Top two bits set so the product of two such primes has 2*bits bits.
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_class prime;
    mpz_nextprime(prime.get_mpz_t(), candidate.get_mpz_t());
    if (static_cast<int>(mpz_sizeinbase(prime.get_mpz_t(), 2)) == bits) {
      return prime;
    }
  }
}

std::uint64_t KeyId(Scheme scheme, const mpz_class& n) {
  return Fnv1a64(std::string(ToString(scheme)) + ":" + n.get_str(16));
}

void CheckPlaintext(const mpz_class& m, const PublicKey& pk) {
  if (m < 0 || m >= pk.n) throw ArgumentError("plaintext outside [0, n)");
}

void CheckCompatible(const CipherVector& a, const CipherVector& b,
                     const PublicKey& pk) {
  if (a.scheme != b.scheme || a.scheme != pk.scheme) {
    throw SchemeMismatchError("cannot combine " +
                              std::string(ToString(a.scheme)) + " and " +
                              std::string(ToString(b.scheme)) +
                              " ciphertexts");
  }
  if (a.key_id != b.key_id || a.key_id != pk.key_id) {
    throw SchemeMismatchError("ciphertexts were made under different keys");
  }
  if (a.dim != b.dim) {
    throw DimensionError("cipher vectors of dimension " +
                         std::to_string(a.dim) + " and " +
                         std::to_string(b.dim));
  }
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint64_t GetBE(std::span<const std::uint8_t> bytes, std::size_t& at,
                    int width) {
  if (at + static_cast<std::size_t>(width) > bytes.size()) {
    throw ArgumentError("truncated cipher vector");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | bytes[at++];
  return v;
}

// Precomputed values for arithmetic modulo p^2 and q^2.
struct Crt {
  explicit Crt(const PrivateKey& sk)
      : p(sk.p), q(sk.q), p2(sk.p * sk.p), q2(sk.q * sk.q) {
    const mpz_class n = p * q;
    en_p = n % (p * (p - 1));
    en_q = n % (q * (q - 1));
    mpz_invert(q2_inv.get_mpz_t(), q2.get_mpz_t(), p2.get_mpz_t());
    mpz_invert(q_inv.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    // L((1 + n)^(p - 1) mod p^2) = (p - 1) q mod p
    mpz_class lp = ((p - 1) * q) % p, lq = ((q - 1) * p) % q;
    mpz_invert(hp.get_mpz_t(), lp.get_mpz_t(), p.get_mpz_t());
    mpz_invert(hq.get_mpz_t(), lq.get_mpz_t(), q.get_mpz_t());
  }

  // r^n mod n^2
  mpz_class PowN(const mpz_class& r) const {
    mpz_class a, b;
    mpz_powm(a.get_mpz_t(), r.get_mpz_t(), en_p.get_mpz_t(), p2.get_mpz_t());
    mpz_powm(b.get_mpz_t(), r.get_mpz_t(), en_q.get_mpz_t(), q2.get_mpz_t());
    mpz_class t = ((a - b) * q2_inv) % p2;
    if (t < 0) t += p2;
    return b + q2 * t;
  }

  mpz_class Decrypt(const mpz_class& c) const {
    mpz_class u, v;
    mpz_powm(u.get_mpz_t(), c.get_mpz_t(), mpz_class(p - 1).get_mpz_t(), p2.get_mpz_t());
    mpz_powm(v.get_mpz_t(), c.get_mpz_t(), mpz_class(q - 1).get_mpz_t(), q2.get_mpz_t());
    const mpz_class mp = (((u - 1) / p) * hp) % p;
    const mpz_class mq = (((v - 1) / q) * hq) % q;
    mpz_class t = ((mp - mq) * q_inv) % p;
    if (t < 0) t += p;
    return mq + q * t;
  }

  mpz_class p, q, p2, q2, en_p, en_q, q2_inv, q_inv, hp, hq;
};

bool HasFactors(const PrivateKey& sk) {
  return sk.scheme == Scheme::kPaillier && sk.p != 0 && sk.q != 0;
}

}  // namespace

std::string_view ToString(Scheme scheme) {
  return scheme == Scheme::kPaillier ? "paillier" : "null";
}

Scheme ParseScheme(std::string_view s) {
  if (s == "null") return Scheme::kNull;
  if (s == "paillier") return Scheme::kPaillier;
  throw ArgumentError("unknown cipher '" + std::string(s) + "'");
}

AheKeyPair Keygen(int bits, const FixedPointCodec& codec, SeededRng& rng) {
  if (bits != 1024 && bits != 2048 && bits != 3072) {
    throw ArgumentError("paillier modulus must be 1024, 2048 or 3072 bits, got " +
                        std::to_string(bits));
  }
  codec.Validate();
  for (;;) {
    const mpz_class p = RandomPrime(bits / 2, rng);
    const mpz_class q = RandomPrime(bits / 2, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    if (static_cast<int>(mpz_sizeinbase(n.get_mpz_t(), 2)) != bits) continue;
    const mpz_class phi = (p - 1) * (q - 1);
    if (gcd(n, phi) != 1) continue;
    mpz_class lambda;
    mpz_lcm(lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
            mpz_class(q - 1).get_mpz_t());
    mpz_class mu;
    if (mpz_invert(mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0) {
      continue;
    }
    // Plaintext sums must never wrap modulo n.
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <=
        static_cast<std::size_t>(codec.plaintext_modulus_bits) + 64) {
      throw ArgumentError("paillier modulus too small for the codec");
    }
    AheKeyPair keys;
    keys.codec = codec;
    keys.public_key = {Scheme::kPaillier, n, n * n, KeyId(Scheme::kPaillier, n)};
    keys.private_key = {Scheme::kPaillier, n, lambda, mu, p, q,
                        keys.public_key.key_id};
    return keys;
  }
}

AheKeyPair NullKeygen(const FixedPointCodec& codec) {
  codec.Validate();
  const mpz_class m = codec.Modulus();
  AheKeyPair keys;
  keys.codec = codec;
  keys.public_key = {Scheme::kNull, m, m, KeyId(Scheme::kNull, m)};
  keys.private_key = {Scheme::kNull, m, 0, 0, 0, 0, keys.public_key.key_id};
  return keys;
}

mpz_class Encrypt(const mpz_class& m, const PublicKey& pk, SeededRng& rng) {
  CheckPlaintext(m, pk);
  if (pk.scheme == Scheme::kNull) return m;
  // (1 + n)^m = 1 + m n (mod n^2)
  const mpz_class r = RandomBelow(pk.n, rng);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  mpz_class c = (1 + m * pk.n) % pk.n_squared;
  c = (c * rn) % pk.n_squared;
  return c;
}

mpz_class Decrypt(const mpz_class& c, const PrivateKey& sk) {
  if (sk.scheme == Scheme::kNull) {
    if (c < 0 || c >= sk.n) throw DecryptError("ciphertext outside [0, M)");
    return c;
  }
  const mpz_class n2 = sk.n * sk.n;
  if (c <= 0 || c >= n2) throw DecryptError("ciphertext outside Z*_{n^2}");
  if (HasFactors(sk)) return Crt(sk).Decrypt(c);
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.get_mpz_t(), sk.lambda.get_mpz_t(), n2.get_mpz_t());
  const mpz_class l = (u - 1) / sk.n;
  return (l * sk.mu) % sk.n;
}

mpz_class AddCiphertexts(const mpz_class& a, const mpz_class& b,
                         const PublicKey& pk) {
  if (pk.scheme == Scheme::kNull) return (a + b) % pk.n;
  return (a * b) % pk.n_squared;
}

CipherVector EncryptVector(const ParamVector& v, const PublicKey& pk,
                           const FixedPointCodec& codec, SeededRng& rng) {
  CipherVector out{{}, v.dim(), pk.scheme, pk.key_id};
  out.elements.reserve(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out.elements.push_back(Encrypt(EncodeFixed(v[i], codec), pk, rng));
  }
  return out;
}

CipherVector EncryptVector(const ParamVector& v, const AheKeyPair& keys,
                           SeededRng& rng) {
  const PublicKey& pk = keys.public_key;
  if (!HasFactors(keys.private_key)) return EncryptVector(v, pk, keys.codec, rng);
  const Crt crt(keys.private_key);
  CipherVector out{{}, v.dim(), pk.scheme, pk.key_id};
  out.elements.reserve(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const mpz_class m = EncodeFixed(v[i], keys.codec);
    CheckPlaintext(m, pk);
    const mpz_class r = RandomBelow(pk.n, rng);
    mpz_class c = (1 + m * pk.n) % pk.n_squared;
    out.elements.push_back((c * crt.PowN(r)) % pk.n_squared);
  }
  return out;
}

ParamVector DecryptVector(const CipherVector& c, const PrivateKey& sk,
                          const FixedPointCodec& codec) {
  if (c.scheme != sk.scheme || c.key_id != sk.key_id) {
    throw DecryptError("private key does not match the ciphertext");
  }
  if (c.elements.size() != c.dim) {
    throw DimensionError("cipher vector element count differs from dim");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(c.dim));
  if (HasFactors(sk)) {
    const Crt crt(sk);
    const mpz_class n2 = sk.n * sk.n;
    for (std::size_t i = 0; i < c.dim; ++i) {
      const mpz_class& e = c.elements[i];
      if (e <= 0 || e >= n2) throw DecryptError("ciphertext outside Z*_{n^2}");
      out[static_cast<Eigen::Index>(i)] = DecodeFixed(crt.Decrypt(e), codec);
    }
    return ParamVector(std::move(out));
  }
  for (std::size_t i = 0; i < c.dim; ++i) {
    out[static_cast<Eigen::Index>(i)] = DecodeFixed(Decrypt(c.elements[i], sk), codec);
  }
  return ParamVector(std::move(out));
}

CipherVector AddCipher(const CipherVector& a, const CipherVector& b,
                       const PublicKey& pk) {
  CheckCompatible(a, b, pk);
  CipherVector out{{}, a.dim, a.scheme, a.key_id};
  out.elements.reserve(a.dim);
  for (std::size_t i = 0; i < a.dim; ++i) {
    out.elements.push_back(AddCiphertexts(a.elements[i], b.elements[i], pk));
  }
  return out;
}

CipherVector SubCipher(const CipherVector& a, const ParamVector& r,
                       const PublicKey& pk, const FixedPointCodec& codec,
                       SeededRng& rng) {
  return AddCipher(a, EncryptVector(-r, pk, codec, rng), pk);
}

CipherVector SubCipher(const CipherVector& a, const ParamVector& r,
                       const AheKeyPair& keys, SeededRng& rng) {
  return AddCipher(a, EncryptVector(-r, keys, rng), keys.public_key);
}

std::vector<std::uint8_t> Serialize(const CipherVector& c) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(c.scheme));
  PutU64(out, c.key_id);
  PutU32(out, static_cast<std::uint32_t>(c.dim));
  for (const auto& e : c.elements) {
    std::size_t count = 0;
    std::vector<std::uint8_t> mag((mpz_sizeinbase(e.get_mpz_t(), 2) + 7) / 8);
    mpz_export(mag.data(), &count, 1, 1, 1, 0, e.get_mpz_t());
    mag.resize(count);
    PutU32(out, static_cast<std::uint32_t>(count));
    out.insert(out.end(), mag.begin(), mag.end());
  }
  return out;
}

CipherVector Deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t at = 0;
  CipherVector c;
  const auto scheme = GetBE(bytes, at, 1);
  if (scheme > 1) throw ArgumentError("unknown scheme tag in cipher vector");
  c.scheme = static_cast<Scheme>(scheme);
  c.key_id = GetBE(bytes, at, 8);
  c.dim = static_cast<std::size_t>(GetBE(bytes, at, 4));
  for (std::size_t i = 0; i < c.dim; ++i) {
    const auto len = static_cast<std::size_t>(GetBE(bytes, at, 4));
    if (at + len > bytes.size()) throw ArgumentError("truncated cipher vector");
    mpz_class e = 0;
    if (len > 0) mpz_import(e.get_mpz_t(), len, 1, 1, 1, 0, bytes.data() + at);
    at += len;
    c.elements.push_back(std::move(e));
  }
  if (at != bytes.size()) throw ArgumentError("trailing bytes after cipher vector");
  return c;
}

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

std::vector<std::uint8_t> FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw ArgumentError("odd-length hex string");
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw ArgumentError("invalid hex digit");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

nlohmann::json ToJson(const PublicKey& pk) {
  return {{"scheme", ToString(pk.scheme)}, {"n", pk.n.get_str(16)}};
}

nlohmann::json ToJson(const PrivateKey& sk) {
  return {{"scheme", ToString(sk.scheme)},
          {"n", sk.n.get_str(16)},
          {"lambda", sk.lambda.get_str(16)},
          {"mu", sk.mu.get_str(16)},
          {"p", sk.p.get_str(16)},
          {"q", sk.q.get_str(16)}};
}

PublicKey PublicKeyFromJson(const nlohmann::json& j) {
  PublicKey pk;
  pk.scheme = ParseScheme(j.at("scheme").get<std::string>());
  pk.n = mpz_class(j.at("n").get<std::string>(), 16);
  pk.n_squared = pk.scheme == Scheme::kNull ? pk.n : pk.n * pk.n;
  pk.key_id = KeyId(pk.scheme, pk.n);
  return pk;
}

PrivateKey PrivateKeyFromJson(const nlohmann::json& j) {
  PrivateKey sk;
  sk.scheme = ParseScheme(j.at("scheme").get<std::string>());
  sk.n = mpz_class(j.at("n").get<std::string>(), 16);
  sk.lambda = mpz_class(j.at("lambda").get<std::string>(), 16);
  sk.mu = mpz_class(j.at("mu").get<std::string>(), 16);
  if (j.contains("p") && j.contains("q")) {
    sk.p = mpz_class(j.at("p").get<std::string>(), 16);
    sk.q = mpz_class(j.at("q").get<std::string>(), 16);
    if (sk.p * sk.q != sk.n) throw ArgumentError("private key factors do not multiply to n");
  }
  sk.key_id = KeyId(sk.scheme, sk.n);
  return sk;
}

}  // namespace fedring::csahe
