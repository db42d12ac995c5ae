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

#include "fedring/rng.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "fedring/errors.h"

namespace fedring {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SeededRng::SeededRng(std::uint64_t seed, std::string_view stream_id)
    : key_(Mix64(Mix64(seed) ^ Fnv1a64(stream_id))),
      stream_id_(stream_id) {}

SeededRng::SeededRng(std::uint64_t key, std::string stream_id, int)
    : key_(key), stream_id_(std::move(stream_id)) {}

SeededRng SeededRng::Derive(std::string_view child) const {
  std::uint64_t key = Mix64(key_ ^ Mix64(Fnv1a64(child) + kGolden));
  return SeededRng(key, stream_id_ + "/" + std::string(child), 0);
}

std::uint64_t SeededRng::NextU64() {
  ++counter_;
  return Mix64(Mix64(key_ + counter_ * kGolden) ^ key_);
}

double SeededRng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::UniformInt(std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("UniformInt bound must be positive");
  // Reject the low residues so every value is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = NextU64();
    if (r >= threshold) return r % bound;
  }
}

double SeededRng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> SeededRng::Permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  Shuffle(p);
  return p;
}

void SeededRng::Shuffle(std::vector<std::size_t>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(UniformInt(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fedring
